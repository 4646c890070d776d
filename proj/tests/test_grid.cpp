#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qhhg/grid.hpp"

using namespace qhhg;

namespace {

Grid3 small_grid() {
    return make_grid(Axis::centered(16, 0.5), Axis::centered(12, 0.4), Axis::centered(10, 0.3));
}

Wavefunction3 random_state(const Grid3& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Wavefunction3 psi(g);
    for (auto& a : psi.amp) a = cdouble{dist(rng), dist(rng)};
    return psi;
}

// separable product of 1D closures
template <typename F0, typename F1, typename F2>
Wavefunction3 product_state(const Grid3& g, F0 f0, F1 f1, F2 f2) {
    Wavefunction3 psi(g);
    std::size_t idx = 0;
    for (int i = 0; i < g.axes[0].n_points; ++i) {
        const cdouble a = f0(g.axes[0].coordinate(i));
        for (int j = 0; j < g.axes[1].n_points; ++j) {
            const cdouble b = a * f1(g.axes[1].coordinate(j));
            for (int k = 0; k < g.axes[2].n_points; ++k, ++idx)
                psi.amp[idx] = b * f2(g.axes[2].coordinate(k));
        }
    }
    return psi;
}

}  // namespace

TEST_CASE("centered axis coordinates") {
    const Axis a = Axis::centered(8, 1.0);
    for (int i = 0; i < 8; ++i) REQUIRE(a.coordinate(i) == Catch::Approx(-4.0 + i).margin(0.0));
    const Axis x = Axis::centered(512, 0.4);
    REQUIRE(x.coordinate(0) == Catch::Approx(-102.4));
    REQUIRE(x.coordinate(511) == Catch::Approx(102.0));
}

TEST_CASE("axis validation") {
    REQUIRE_THROWS_AS(Axis::centered(8, 0.0), config_error);
    REQUIRE_THROWS_AS(Axis::centered(9, 0.5), config_error);
    REQUIRE_THROWS_AS(Axis::centered(6, 0.5), config_error);
    REQUIRE_THROWS_AS(Axis::centered(8, -0.1), config_error);
}

TEST_CASE("inner product: normalization, symmetry, linearity") {
    const Grid3 g = small_grid();
    Wavefunction3 a = random_state(g, 7);
    Wavefunction3 b = random_state(g, 11);
    normalize(a);
    REQUIRE(inner_product(a, a).real() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(inner_product(a, a).imag()) < 1e-14);

    const cdouble ab = inner_product(a, b);
    const cdouble ba = inner_product(b, a);
    REQUIRE(std::abs(ab - std::conj(ba)) < 1e-13 * std::abs(ab));

    // linear in the second argument, antilinear in the first
    const cdouble z{0.3, -1.2};
    Wavefunction3 zb = b;
    for (auto& v : zb.amp) v *= z;
    REQUIRE(std::abs(inner_product(a, zb) - z * ab) < 1e-12 * std::abs(ab));
    Wavefunction3 za = a;
    for (auto& v : za.amp) v *= z;
    REQUIRE(std::abs(inner_product(za, b) - std::conj(z) * ab) < 1e-12 * std::abs(ab));
}

TEST_CASE("grid mismatch raises") {
    const Grid3 g = small_grid();
    const Grid3 h = make_grid(Axis::centered(16, 0.5), Axis::centered(12, 0.4),
                              Axis::centered(12, 0.3));
    Wavefunction3 a(g), b(h);
    REQUIRE_THROWS_AS(inner_product(a, b), shape_error);
}

TEST_CASE("orthogonal oscillator eigenfunctions") {
    const Grid3 g = make_grid(Axis::centered(256, 0.1), Axis::centered(8, 1.0),
                              Axis::centered(8, 1.0));
    auto gauss = [](double x) { return cdouble{std::exp(-0.5 * x * x), 0.0}; };
    auto one = [](double) { return cdouble{1.0, 0.0}; };
    Wavefunction3 h0 = product_state(g, gauss, one, one);
    Wavefunction3 h1 = product_state(
        g, [](double x) { return cdouble{x * std::exp(-0.5 * x * x), 0.0}; }, one, one);
    normalize(h0);
    normalize(h1);
    REQUIRE(std::abs(inner_product(h0, h1)) < 1e-8);
}

TEST_CASE("kinetic operator on plane waves") {
    const Grid3 g = small_grid();
    auto one = [](double) { return cdouble{1.0, 0.0}; };

    // constant function: zero kinetic energy
    Wavefunction3 flat = product_state(g, one, one, one);
    Wavefunction3 kflat = apply_kinetic(flat, {1.0, 1.0, 1.0});
    for (const auto& v : kflat.amp) REQUIRE(std::abs(v) < 1e-12);

    // resolved plane wave along x is an exact eigenfunction
    const Axis& ax = g.axes[0];
    const double k = 2.0 * kPi / ax.length() * 4.0;
    Wavefunction3 pw = product_state(
        g, [k](double x) { return std::polar(1.0, k * x); }, one, one);
    const double mass = 1.0;
    Wavefunction3 kpw = apply_kinetic(pw, {mass, 1.0, 1.0});
    const double eig = k * k / (2.0 * mass);
    for (std::size_t i = 0; i < pw.amp.size(); ++i)
        REQUIRE(std::abs(kpw.amp[i] - eig * pw.amp[i]) < 1e-10 * eig);
}

TEST_CASE("kinetic expectation of a gaussian") {
    const Grid3 g = make_grid(Axis::centered(128, 0.15), Axis::centered(64, 0.2),
                              Axis::centered(64, 0.25));
    const double s0 = 0.9, s1 = 1.1, s2 = 0.75;
    auto gs = [](double s) {
        return [s](double x) { return cdouble{std::exp(-x * x / (2.0 * s * s)), 0.0}; };
    };
    Wavefunction3 psi = product_state(g, gs(s0), gs(s1), gs(s2));
    normalize(psi);
    const double expected = 1.0 / (4.0 * s0 * s0) + 1.0 / (4.0 * s1 * s1) + 1.0 / (4.0 * s2 * s2);
    const double t1 = kinetic_expectation(psi, {1.0, 1.0, 1.0});
    REQUIRE(t1 == Catch::Approx(expected).epsilon(1e-6));

    // same value through apply_kinetic + inner product
    Wavefunction3 tpsi = apply_kinetic(psi, {1.0, 1.0, 1.0});
    REQUIRE(inner_product(psi, tpsi).real() == Catch::Approx(expected).epsilon(1e-6));
}

TEST_CASE("parseval norm identity") {
    const Grid3 g = small_grid();
    Wavefunction3 psi = random_state(g, 23);
    const double a = norm_squared(psi);
    const double b = spectral_norm_squared(psi);
    REQUIRE(std::abs(a - b) < 1e-10 * a);
}

TEST_CASE("coordinate moments") {
    const Grid3 g = make_grid(Axis::centered(128, 0.15), Axis::centered(32, 0.45),
                              Axis::centered(32, 0.45));
    const double shift = 1.2;
    auto shifted = [shift](double x) {
        return cdouble{std::exp(-(x - shift) * (x - shift)), 0.0};
    };
    auto one = [](double q) { return cdouble{std::exp(-0.5 * q * q), 0.0}; };
    Wavefunction3 psi = product_state(g, shifted, one, one);
    normalize(psi);
    REQUIRE(coordinate_moment(psi, 0, 1) == Catch::Approx(shift).epsilon(1e-8));
    REQUIRE(coordinate_moment(psi, 1, 1) == Catch::Approx(0.0).margin(1e-12));
}
