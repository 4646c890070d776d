#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qhhg/axis.hpp"
#include "qhhg/common.hpp"
#include "qhhg/fft.hpp"

namespace qhhg {

struct RelaxOptions {
    double tol = 1e-10;   // convergence threshold on the energy change per sweep
    double dtau = 0.05;   // imaginary time step
    long max_iter = 100000;
};

struct Relax1DResult {
    std::vector<cdouble> orbital;  // normalized ground orbital on the axis
    double energy = 0.0;           // Rayleigh quotient <T> + <V>
    long iterations = 0;
    double residual = 0.0;         // last |dE| between sweeps
};

namespace detail {

inline double rayleigh_energy_1d(const Axis& axis, std::span<const cdouble> psi,
                                 std::span<const double> pot, const FourierTransformer& fft) {
    const int n = axis.n_points;
    std::vector<double> vterms(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        vterms[static_cast<std::size_t>(i)] =
            std::norm(psi[static_cast<std::size_t>(i)]) * pot[static_cast<std::size_t>(i)];
    std::vector<cdouble> work(psi.begin(), psi.end());
    fft.forward(work.data());
    std::vector<double> tterms(static_cast<std::size_t>(n));
    std::vector<double> nterms(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double k = axis.wavenumber(i);
        tterms[static_cast<std::size_t>(i)] = std::norm(work[static_cast<std::size_t>(i)]) * 0.5 * k * k;
        nterms[static_cast<std::size_t>(i)] = std::norm(work[static_cast<std::size_t>(i)]);
    }
    const double tnum = pairwise_sum(std::span<const double>(tterms));
    const double tden = pairwise_sum(std::span<const double>(nterms));
    std::vector<double> dterms(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        dterms[static_cast<std::size_t>(i)] = std::norm(psi[static_cast<std::size_t>(i)]);
    const double den = pairwise_sum(std::span<const double>(dterms));
    return (pairwise_sum(std::span<const double>(vterms)) + tnum / tden * den) / den;
}

}  // namespace detail

/// Ground state of p^2/2 + V(x) on a 1D axis by imaginary-time split
/// stepping with per-sweep renormalization. Converged when the energy
/// estimate changes by less than tol on two consecutive sweeps.
inline Relax1DResult relax_ground_state_1d(const Axis& axis,
                                           const std::function<double(double)>& potential,
                                           const RelaxOptions& opts = {}) {
    axis.validate();
    if (!(opts.dtau > 0.0)) throw config_error("relaxation dtau must be positive");
    const int n = axis.n_points;
    const std::array<int, 1> dims{n};
    FourierTransformer fft(std::span<const int>(dims.data(), 1));

    std::vector<double> pot(static_cast<std::size_t>(n));
    std::vector<double> half_v(static_cast<std::size_t>(n));
    std::vector<double> kin(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        pot[static_cast<std::size_t>(i)] = potential(axis.coordinate(i));
        half_v[static_cast<std::size_t>(i)] =
            std::exp(-0.5 * opts.dtau * pot[static_cast<std::size_t>(i)]);
        const double k = axis.wavenumber(i);
        kin[static_cast<std::size_t>(i)] =
            std::exp(-opts.dtau * 0.5 * k * k) / static_cast<double>(n);
    }

    // smooth even initial guess
    std::vector<cdouble> psi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = axis.coordinate(i);
        psi[static_cast<std::size_t>(i)] = std::exp(-0.5 * x * x / (1.5 * 1.5));
    }

    auto renormalize = [&]() -> double {
        std::vector<double> terms(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            terms[static_cast<std::size_t>(i)] = std::norm(psi[static_cast<std::size_t>(i)]);
        const double n2 = pairwise_sum(std::span<const double>(terms)) * axis.spacing;
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& a : psi) a *= inv;
        return n2;
    };
    renormalize();

    double e_prev = 1e300;
    long sweeps = 0;
    int settled = 0;
    double resid = 1e300;
    for (; sweeps < opts.max_iter; ++sweeps) {
        for (int i = 0; i < n; ++i) psi[static_cast<std::size_t>(i)] *= half_v[static_cast<std::size_t>(i)];
        fft.forward(psi.data());
        for (int i = 0; i < n; ++i) psi[static_cast<std::size_t>(i)] *= kin[static_cast<std::size_t>(i)];
        fft.backward_unnormalized(psi.data());
        for (int i = 0; i < n; ++i) psi[static_cast<std::size_t>(i)] *= half_v[static_cast<std::size_t>(i)];
        const double n2 = renormalize();
        // norm decay over one sweep estimates the energy
        const double e_now = -0.5 * std::log(n2) / opts.dtau;
        resid = std::abs(e_now - e_prev);
        e_prev = e_now;
        if (resid < opts.tol) {
            if (++settled >= 2) break;
        } else {
            settled = 0;
        }
    }
    if (settled < 2)
        throw relaxation_error("imaginary-time relaxation did not converge: residual " +
                               std::to_string(resid) + " after " + std::to_string(sweeps) +
                               " sweeps");

    Relax1DResult out;
    out.iterations = sweeps + 1;
    out.residual = resid;
    out.energy = detail::rayleigh_energy_1d(axis, psi, pot, fft);
    out.orbital = std::move(psi);
    return out;
}

}  // namespace qhhg
