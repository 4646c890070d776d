// Shared builders for test states.
#pragma once

#include <vector>

#include "qhhg/grid.hpp"
#include "qhhg/photonics.hpp"

namespace qhhg::testutil {

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

/// Coherent state of complex amplitude alpha on a 1D axis, normalized on the
/// grid. Displacement q0 = sqrt(2/w) Re(alpha), momentum p0 = sqrt(2w) Im(alpha).
inline std::vector<cdouble> coherent_1d(const Axis& axis, double omega, cdouble alpha) {
    const double q0 = std::sqrt(2.0 / omega) * alpha.real();
    const double p0 = std::sqrt(2.0 * omega) * alpha.imag();
    std::vector<cdouble> phi(static_cast<std::size_t>(axis.n_points));
    double n2 = 0.0;
    for (int i = 0; i < axis.n_points; ++i) {
        const double q = axis.coordinate(i);
        phi[static_cast<std::size_t>(i)] =
            std::polar(std::exp(-0.5 * omega * (q - q0) * (q - q0)), p0 * q);
        n2 += std::norm(phi[static_cast<std::size_t>(i)]);
    }
    const double inv = 1.0 / std::sqrt(n2 * axis.spacing);
    for (auto& v : phi) v *= inv;
    return phi;
}

/// Oscillator eigenfunction |n> on a 1D axis, grid-normalized.
inline std::vector<cdouble> fock_1d(const Axis& axis, double omega, int n) {
    const auto basis = hermite_basis(axis, omega, n);
    std::vector<cdouble> phi(static_cast<std::size_t>(axis.n_points));
    double n2 = 0.0;
    for (int i = 0; i < axis.n_points; ++i) {
        phi[static_cast<std::size_t>(i)] = basis[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
        n2 += std::norm(phi[static_cast<std::size_t>(i)]);
    }
    const double inv = 1.0 / std::sqrt(n2 * axis.spacing);
    for (auto& v : phi) v *= inv;
    return phi;
}

/// Two-mode photon state from per-mode 1D amplitude vectors.
inline PhotonState photon_product(const Axis& q1, const Axis& q2, double w1, double w2,
                                  const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    PhotonState s;
    s.q1 = q1;
    s.q2 = q2;
    s.omega1 = w1;
    s.omega2 = w2;
    s.amp.resize(static_cast<std::size_t>(q1.n_points) * static_cast<std::size_t>(q2.n_points));
    for (int j = 0; j < q1.n_points; ++j)
        for (int k = 0; k < q2.n_points; ++k)
            s.amp[s.index(j, k)] = a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k)];
    return s;
}

}  // namespace qhhg::testutil
