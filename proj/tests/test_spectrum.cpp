#include <catch2/catch_amalgamated.hpp>

#include "qhhg/spectrum.hpp"

using namespace qhhg;

namespace {

DipoleRecord sine_record(double omega, double t_end, double dt) {
    DipoleRecord r;
    for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
        r.times.push_back(t);
        r.dipole.push_back(std::sin(omega * t));
        r.norm.push_back(1.0);
    }
    return r;
}

}  // namespace

TEST_CASE("pure sinusoid peaks at its harmonic order") {
    const double w = 0.057;
    const EnvelopeTimes env = EnvelopeTimes::from_cycles(w);
    DipoleRecord rec = sine_record(3.0 * w, env.t_s, 0.2);

    const Spectrum bare = hhg_spectrum(rec, w, SpectrumWindow::None);
    // global maximum sits within a bin of order 3
    std::size_t best = 0;
    for (std::size_t m = 1; m < bare.power.size(); ++m)
        if (bare.power[m] > bare.power[best]) best = m;
    const double bin = bare.harmonic_order[1] - bare.harmonic_order[0];
    REQUIRE(std::abs(bare.harmonic_order[best] - 3.0) < 2.0 * bin);

    // windowing does not move the peak by more than one bin
    const Spectrum windowed = hhg_spectrum(rec, w, SpectrumWindow::Envelope, &env);
    std::size_t best_w = 0;
    for (std::size_t m = 1; m < windowed.power.size(); ++m)
        if (windowed.power[m] > windowed.power[best_w]) best_w = m;
    REQUIRE(std::abs(windowed.harmonic_order[best_w] - bare.harmonic_order[best]) <=
            bin + 1e-12);

    // and the peak dominates neighbouring integer orders
    REQUIRE(peak_power_near_order(windowed, 3.0) >
            1e4 * peak_power_near_order(windowed, 2.0, 0.4));
    REQUIRE(peak_power_near_order(windowed, 3.0) >
            1e4 * peak_power_near_order(windowed, 4.0, 0.4));
}

TEST_CASE("records below four cycles are rejected") {
    const double w = 0.057;
    DipoleRecord rec = sine_record(3.0 * w, 3.0 * 2.0 * kPi / w, 0.2);
    REQUIRE_THROWS_AS(hhg_spectrum(rec, w, SpectrumWindow::None), resolution_error);
}

TEST_CASE("nonuniform sampling is rejected") {
    const double w = 0.057;
    DipoleRecord rec = sine_record(3.0 * w, 8.0 * 2.0 * kPi / w, 0.2);
    rec.times[10] += 0.05;
    REQUIRE_THROWS_AS(hhg_spectrum(rec, w, SpectrumWindow::None), resolution_error);
}

TEST_CASE("envelope window requires envelope times") {
    const double w = 0.057;
    DipoleRecord rec = sine_record(3.0 * w, 8.0 * 2.0 * kPi / w, 0.2);
    REQUIRE_THROWS_AS(hhg_spectrum(rec, w, SpectrumWindow::Envelope, nullptr), config_error);
}
