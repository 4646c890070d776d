#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "qhhg/axis.hpp"
#include "qhhg/common.hpp"
#include "qhhg/fft.hpp"
#include "qhhg/grid.hpp"

namespace qhhg {

// ---------------------------------------------------------------------------
// Conditional two-mode photon state
// ---------------------------------------------------------------------------

/// Photon-plane wavefunction after projecting the joint state onto the
/// electronic ground orbital and renormalizing. Row-major (q1 outer).
struct PhotonState {
    Axis q1{};
    Axis q2{};
    std::vector<cdouble> amp;
    double projection_weight = 1.0;  // |<g|Psi>| before normalization
    double omega1 = 0.0;
    double omega2 = 0.0;

    std::size_t index(int j, int k) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(q2.n_points) +
               static_cast<std::size_t>(k);
    }
    double cell_area() const { return q1.spacing * q2.spacing; }
};

/// phi(q1,q2) = integral conj(phi_g(x)) Psi(x,q1,q2) dx, then normalized.
/// Fails when the electron has (numerically) no ground-state component left.
inline PhotonState project_ground_state(const Wavefunction3& psi,
                                        std::span<const cdouble> orbital, double omega1,
                                        double omega2, double weight_floor = 1e-6) {
    const Grid3& g = psi.grid;
    if (orbital.size() != static_cast<std::size_t>(g.axes[0].n_points))
        throw shape_error("orbital length does not match the electron axis");
    PhotonState out;
    out.q1 = g.axes[1];
    out.q2 = g.axes[2];
    out.omega1 = omega1;
    out.omega2 = omega2;
    const std::size_t plane = g.plane_size();
    out.amp.assign(plane, cdouble{0.0, 0.0});
    const double dx = g.axes[0].spacing;
    for (int i = 0; i < g.axes[0].n_points; ++i) {
        const cdouble w = std::conj(orbital[static_cast<std::size_t>(i)]) * dx;
        const cdouble* slab = psi.amp.data() + static_cast<std::size_t>(i) * plane;
        for (std::size_t m = 0; m < plane; ++m) out.amp[m] += w * slab[m];
    }
    std::vector<double> terms(plane);
    for (std::size_t m = 0; m < plane; ++m) terms[m] = std::norm(out.amp[m]);
    const double n2 = pairwise_sum(std::span<const double>(terms)) * out.cell_area();
    const double weight = std::sqrt(n2);
    if (!(weight >= weight_floor))
        throw projection_error("degenerate projection: ground-state weight " +
                               std::to_string(weight) + " below floor");
    const double inv = 1.0 / weight;
    for (auto& a : out.amp) a *= inv;
    out.projection_weight = weight;
    return out;
}

// ---------------------------------------------------------------------------
// Fock expansion
// ---------------------------------------------------------------------------

/// Orthonormal oscillator eigenfunctions chi_0..chi_n_max of frequency omega,
/// sampled on an axis. Upward recurrence on the normalized functions, which
/// stays stable for any order the grid can resolve.
inline std::vector<std::vector<double>> hermite_basis(const Axis& axis, double omega,
                                                      int n_max) {
    if (n_max < 0) throw domain_error("n_max must be non-negative");
    if (!(omega > 0.0)) throw domain_error("mode frequency must be positive");
    const int n = axis.n_points;
    const double sw = std::sqrt(omega);
    std::vector<std::vector<double>> basis(static_cast<std::size_t>(n_max) + 1,
                                           std::vector<double>(static_cast<std::size_t>(n)));
    const double norm0 = std::pow(omega / kPi, 0.25);
    for (int i = 0; i < n; ++i) {
        const double u = sw * axis.coordinate(i);
        basis[0][static_cast<std::size_t>(i)] = norm0 * std::exp(-0.5 * u * u);
        if (n_max >= 1)
            basis[1][static_cast<std::size_t>(i)] =
                std::sqrt(2.0) * u * basis[0][static_cast<std::size_t>(i)];
        for (int m = 2; m <= n_max; ++m)
            basis[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] =
                std::sqrt(2.0 / m) * u * basis[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(i)] -
                std::sqrt((m - 1.0) / m) * basis[static_cast<std::size_t>(m - 2)][static_cast<std::size_t>(i)];
    }
    return basis;
}

/// Highest Hermite order the axis can represent: the classical turning point
/// must sit inside the box with room for the tail, and the fastest
/// oscillation needs at least `pts_per_osc` samples.
inline int resolvable_hermite_order(const Axis& axis, double omega, double pts_per_osc = 4.0,
                                    double tail_margin_u = 2.0) {
    const double sw = std::sqrt(omega);
    const double u_box = axis.max_abs_coordinate() * sw;
    const double du = axis.spacing * sw;
    const double turn = u_box - tail_margin_u;
    const int n_extent = turn > 1.0 ? static_cast<int>((turn * turn - 1.0) / 2.0) : 0;
    const double kq = 2.0 * kPi / (pts_per_osc * du);
    const int n_sampling = kq > 1.0 ? static_cast<int>((kq * kq - 1.0) / 2.0) : 0;
    return std::max(0, std::min(n_extent, n_sampling));
}

struct FockCoefficients {
    int n_max = 0;  // inclusive maximum index per mode
    std::vector<cdouble> c;  // (n_max+1)^2, row-major in (n, m)
    double leakage = 0.0;    // 1 - sum |c|^2

    cdouble at(int n, int m) const {
        return c[static_cast<std::size_t>(n) * static_cast<std::size_t>(n_max + 1) +
                 static_cast<std::size_t>(m)];
    }
    cdouble& at(int n, int m) {
        return c[static_cast<std::size_t>(n) * static_cast<std::size_t>(n_max + 1) +
                 static_cast<std::size_t>(m)];
    }
};

/// c[n][m] = integral chi_n(q1) chi_m(q2) phi(q1,q2) dq1 dq2.
inline FockCoefficients fock_expand(const PhotonState& state, int n_max,
                                    double leakage_limit = 1e-4) {
    const auto b1 = hermite_basis(state.q1, state.omega1, n_max);
    const auto b2 = hermite_basis(state.q2, state.omega2, n_max);
    const int n1 = state.q1.n_points;
    const int n2 = state.q2.n_points;
    FockCoefficients out;
    out.n_max = n_max;
    out.c.assign(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 1),
                 cdouble{0.0, 0.0});
    // contract q1 first: T[n][k] = sum_j chi_n(q1_j) phi[j][k]
    std::vector<cdouble> t(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n2),
                           cdouble{0.0, 0.0});
    for (int nn = 0; nn <= n_max; ++nn) {
        cdouble* trow = t.data() + static_cast<std::size_t>(nn) * static_cast<std::size_t>(n2);
        const double* chi = b1[static_cast<std::size_t>(nn)].data();
        for (int j = 0; j < n1; ++j) {
            const double w = chi[j];
            const cdouble* prow = state.amp.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n2);
            for (int k = 0; k < n2; ++k) trow[k] += w * prow[k];
        }
    }
    const double area = state.cell_area();
    for (int nn = 0; nn <= n_max; ++nn) {
        const cdouble* trow = t.data() + static_cast<std::size_t>(nn) * static_cast<std::size_t>(n2);
        for (int mm = 0; mm <= n_max; ++mm) {
            const double* chi = b2[static_cast<std::size_t>(mm)].data();
            cdouble acc{0.0, 0.0};
            for (int k = 0; k < n2; ++k) acc += trow[k] * chi[k];
            out.at(nn, mm) = acc * area;
        }
    }
    double captured = 0.0;
    for (const cdouble& v : out.c) captured += std::norm(v);
    out.leakage = 1.0 - captured;
    if (out.leakage > leakage_limit)
        throw truncation_error("Fock truncation leakage " + std::to_string(out.leakage) +
                               " exceeds " + std::to_string(leakage_limit) +
                               "; increase N_max or the photon grid resolution");
    return out;
}

// ---------------------------------------------------------------------------
// Correlators
// ---------------------------------------------------------------------------

/// All scalar quantum-optical observables for one analyzed state. Ratio
/// entries whose denominator vanished hold the undefined-value sentinel.
struct CorrelatorSet {
    double n_i = 0.0;
    double n_j = 0.0;
    double self4_i = 0.0;  // <a_i^+2 a_i^2> = <n(n-1)>
    double self4_j = 0.0;
    double cross4 = 0.0;   // <a_i^+ a_j^+ a_i a_j> = <n_i n_j>
    double g2_ii = 0.0;
    double g2_jj = 0.0;
    double g2_ij = 0.0;
    double r = 0.0;        // cross4^2 / (self4_i * self4_j)
    double q_i = 0.0;      // Mandel Q = n (g2 - 1)
    double q_j = 0.0;
};

/// Build the ratio observables from raw moments, guarding denominators.
inline CorrelatorSet ratios_from_raw(double n_i, double n_j, double self4_i, double self4_j,
                                     double cross4, double denom_floor = 1e-30) {
    CorrelatorSet c;
    c.n_i = n_i;
    c.n_j = n_j;
    c.self4_i = self4_i;
    c.self4_j = self4_j;
    c.cross4 = cross4;
    const double nii = n_i * n_i;
    const double njj = n_j * n_j;
    const double nij = n_i * n_j;
    const double ss = self4_i * self4_j;
    c.g2_ii = nii > denom_floor ? self4_i / nii : undefined_value();
    c.g2_jj = njj > denom_floor ? self4_j / njj : undefined_value();
    c.g2_ij = nij > denom_floor ? cross4 / nij : undefined_value();
    c.r = ss > denom_floor ? cross4 * cross4 / ss : undefined_value();
    c.q_i = is_defined(c.g2_ii) ? n_i * (c.g2_ii - 1.0) : undefined_value();
    c.q_j = is_defined(c.g2_jj) ? n_j * (c.g2_jj - 1.0) : undefined_value();
    return c;
}

/// Number-diagonal moments from the Fock coefficient matrix.
inline CorrelatorSet correlators(const FockCoefficients& coeffs, double denom_floor = 1e-30) {
    double n_i = 0.0, n_j = 0.0, s_i = 0.0, s_j = 0.0, cross = 0.0;
    for (int n = 0; n <= coeffs.n_max; ++n)
        for (int m = 0; m <= coeffs.n_max; ++m) {
            const double p = std::norm(coeffs.at(n, m));
            n_i += n * p;
            n_j += m * p;
            s_i += static_cast<double>(n) * (n - 1) * p;
            s_j += static_cast<double>(m) * (m - 1) * p;
            cross += static_cast<double>(n) * m * p;
        }
    return ratios_from_raw(n_i, n_j, s_i, s_j, cross, denom_floor);
}

namespace detail {

/// Apply the number operator of one photon mode spectrally:
/// N phi = [(-1/2 d^2/dq^2 + 1/2 w^2 q^2) / w - 1/2] phi.
inline std::vector<cdouble> apply_number_operator(const PhotonState& state, int mode,
                                                  const FourierTransformer& fft) {
    const int n1 = state.q1.n_points;
    const int n2 = state.q2.n_points;
    const Axis& axis = mode == 0 ? state.q1 : state.q2;
    const double w = mode == 0 ? state.omega1 : state.omega2;
    std::vector<cdouble> kinetic = state.amp;
    fft.forward(kinetic.data());
    std::size_t idx = 0;
    for (int j = 0; j < n1; ++j) {
        const double k1 = state.q1.wavenumber(j);
        for (int k = 0; k < n2; ++k, ++idx) {
            const double kk = mode == 0 ? k1 : state.q2.wavenumber(k);
            kinetic[idx] *= 0.5 * kk * kk;
        }
    }
    fft.backward(kinetic.data());
    std::vector<cdouble> out(state.amp.size());
    idx = 0;
    for (int j = 0; j < n1; ++j) {
        for (int k = 0; k < n2; ++k, ++idx) {
            const double q = axis.coordinate(mode == 0 ? j : k);
            out[idx] = (kinetic[idx] + 0.5 * w * w * q * q * state.amp[idx]) / w -
                       0.5 * state.amp[idx];
        }
    }
    return out;
}

inline cdouble plane_inner(std::span<const cdouble> a, std::span<const cdouble> b,
                           double area) {
    std::vector<cdouble> terms(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) terms[i] = std::conj(a[i]) * b[i];
    return pairwise_sum(std::span<const cdouble>(terms)) * area;
}

}  // namespace detail

/// Independent route to the same correlators, straight from the grid
/// amplitudes via the spectral number operator of each mode. Uses
/// <n(n-1)> = <N phi|N phi> - <n> and <n1 n2> = <N1 phi|N2 phi>.
inline CorrelatorSet grid_correlators(const PhotonState& state, double denom_floor = 1e-30) {
    const std::array<int, 2> dims{state.q1.n_points, state.q2.n_points};
    FourierTransformer fft(std::span<const int>(dims.data(), dims.size()));
    const auto n1_phi = detail::apply_number_operator(state, 0, fft);
    const auto n2_phi = detail::apply_number_operator(state, 1, fft);
    const double area = state.cell_area();
    const std::span<const cdouble> phi(state.amp);
    const std::span<const cdouble> np1(n1_phi);
    const std::span<const cdouble> np2(n2_phi);
    const double n_i = detail::plane_inner(phi, np1, area).real();
    const double n_j = detail::plane_inner(phi, np2, area).real();
    const double s_i = detail::plane_inner(np1, np1, area).real() - n_i;
    const double s_j = detail::plane_inner(np2, np2, area).real() - n_j;
    const double cross = detail::plane_inner(np1, np2, area).real();
    return ratios_from_raw(n_i, n_j, s_i, s_j, cross, denom_floor);
}

/// Largest relative deviation between two correlator sets over the raw
/// moments and the defined ratios. Entries below abs_floor on both sides
/// count as numerically zero; the floor sits just above the residue the
/// clipped vacuum tails leave in fourth-order moments on a well-sized axis.
inline double max_relative_deviation(const CorrelatorSet& a, const CorrelatorSet& b,
                                     double abs_floor = 1e-13) {
    auto rel = [abs_floor](double x, double y) {
        const double scale = std::max(std::abs(x), std::abs(y));
        if (scale < abs_floor) return 0.0;
        if (!is_defined(x) || !is_defined(y)) return (is_defined(x) == is_defined(y)) ? 0.0 : 1.0;
        return std::abs(x - y) / scale;
    };
    double dev = 0.0;
    dev = std::max(dev, rel(a.n_i, b.n_i));
    dev = std::max(dev, rel(a.n_j, b.n_j));
    dev = std::max(dev, rel(a.self4_i, b.self4_i));
    dev = std::max(dev, rel(a.self4_j, b.self4_j));
    dev = std::max(dev, rel(a.cross4, b.cross4));
    dev = std::max(dev, rel(a.r, b.r));
    return dev;
}

// ---------------------------------------------------------------------------
// Combined analysis with truncation control
// ---------------------------------------------------------------------------

struct AnalysisOptions {
    int n_max = 32;            // starting truncation per mode
    bool auto_double = true;   // grow until correlators settle (capped by the grid)
    double auto_tol = 1e-8;    // absolute settling tolerance on raw moments
    double leakage_limit = 1e-4;
    double consistency_limit = 1e-4;  // hard failure threshold for the dual path
    double denom_floor = 1e-30;
};

struct PhotonAnalysis {
    FockCoefficients coeffs;
    CorrelatorSet fock;        // primary path
    CorrelatorSet grid;        // permanent cross-check
    double crosscheck_dev = 0.0;
    int n_max_used = 0;
};

inline PhotonAnalysis analyze_photon_state(const PhotonState& state,
                                           const AnalysisOptions& opts = {}) {
    const int cap = std::min(resolvable_hermite_order(state.q1, state.omega1),
                             resolvable_hermite_order(state.q2, state.omega2));
    int n = opts.auto_double ? std::min(opts.n_max, std::max(cap, 2)) : opts.n_max;
    PhotonAnalysis out;
    out.coeffs = fock_expand(state, n, opts.leakage_limit);
    out.fock = correlators(out.coeffs, opts.denom_floor);
    if (opts.auto_double) {
        while (n < cap) {
            const int next = std::min(2 * n, cap);
            FockCoefficients bigger = fock_expand(state, next, opts.leakage_limit);
            CorrelatorSet cs = correlators(bigger, opts.denom_floor);
            const bool settled = std::abs(cs.n_i - out.fock.n_i) < opts.auto_tol &&
                                 std::abs(cs.n_j - out.fock.n_j) < opts.auto_tol &&
                                 std::abs(cs.self4_i - out.fock.self4_i) < opts.auto_tol &&
                                 std::abs(cs.self4_j - out.fock.self4_j) < opts.auto_tol &&
                                 std::abs(cs.cross4 - out.fock.cross4) < opts.auto_tol;
            out.coeffs = std::move(bigger);
            out.fock = cs;
            n = next;
            if (settled) break;
        }
    }
    out.n_max_used = n;
    out.grid = grid_correlators(state, opts.denom_floor);
    out.crosscheck_dev = max_relative_deviation(out.fock, out.grid);
    if (out.crosscheck_dev > opts.consistency_limit)
        throw consistency_error("Fock/grid correlator disagreement " +
                                std::to_string(out.crosscheck_dev) +
                                "; photon grid or truncation under-resolved");
    return out;
}

}  // namespace qhhg
