#pragma once

#include <array>
#include <span>
#include <vector>

#include "qhhg/axis.hpp"
#include "qhhg/common.hpp"
#include "qhhg/fft.hpp"

namespace qhhg {

/// Three-axis Cartesian product grid: electron coordinate first, then the two
/// photon quadrature coordinates. Row-major with the electron axis outermost,
/// so each photon plane (fixed x) is one contiguous block.
struct Grid3 {
    std::array<Axis, 3> axes;

    std::size_t size() const {
        return static_cast<std::size_t>(axes[0].n_points) *
               static_cast<std::size_t>(axes[1].n_points) *
               static_cast<std::size_t>(axes[2].n_points);
    }
    std::size_t plane_size() const {
        return static_cast<std::size_t>(axes[1].n_points) *
               static_cast<std::size_t>(axes[2].n_points);
    }
    double cell_volume() const {
        return axes[0].spacing * axes[1].spacing * axes[2].spacing;
    }
    std::size_t index(int ix, int iq1, int iq2) const {
        return (static_cast<std::size_t>(ix) * static_cast<std::size_t>(axes[1].n_points) +
                static_cast<std::size_t>(iq1)) *
                   static_cast<std::size_t>(axes[2].n_points) +
               static_cast<std::size_t>(iq2);
    }
    std::array<int, 3> dims() const {
        return {axes[0].n_points, axes[1].n_points, axes[2].n_points};
    }

    bool operator==(const Grid3&) const = default;
};

inline Grid3 make_grid(const Axis& x, const Axis& q1, const Axis& q2) {
    x.validate();
    q1.validate();
    q2.validate();
    return Grid3{{x, q1, q2}};
}

/// Complex amplitudes over a Grid3; the joint electron-photon state.
struct Wavefunction3 {
    Grid3 grid;
    std::vector<cdouble> amp;

    Wavefunction3() = default;
    explicit Wavefunction3(const Grid3& g) : grid(g), amp(g.size(), cdouble{0.0, 0.0}) {}
    Wavefunction3(const Grid3& g, std::vector<cdouble> a) : grid(g), amp(std::move(a)) {
        if (amp.size() != grid.size()) throw shape_error("amplitude count does not match grid");
    }
};

inline void require_same_grid(const Wavefunction3& a, const Wavefunction3& b) {
    if (!(a.grid == b.grid)) throw shape_error("wavefunctions live on different grids");
}

/// <a|b> = sum conj(a) * b * dV. Conjugate-symmetric by construction.
inline cdouble inner_product(const Wavefunction3& a, const Wavefunction3& b) {
    require_same_grid(a, b);
    std::vector<cdouble> terms(a.amp.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::conj(a.amp[i]) * b.amp[i];
    return pairwise_sum(std::span<const cdouble>(terms)) * a.grid.cell_volume();
}

inline double norm_squared(const Wavefunction3& psi) {
    std::vector<double> terms(psi.amp.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::norm(psi.amp[i]);
    return pairwise_sum(std::span<const double>(terms)) * psi.grid.cell_volume();
}

inline double norm(const Wavefunction3& psi) { return std::sqrt(norm_squared(psi)); }

inline void normalize(Wavefunction3& psi) {
    const double n = norm(psi);
    if (!(n > 0.0)) throw numerical_error("cannot normalize a zero wavefunction");
    const double inv = 1.0 / n;
    for (auto& a : psi.amp) a *= inv;
}

/// Squared norm evaluated from the spectral representation (Parseval route).
inline double spectral_norm_squared(const Wavefunction3& psi) {
    const auto d = psi.grid.dims();
    FourierTransformer fft(std::span<const int>(d.data(), d.size()));
    std::vector<cdouble> work = psi.amp;
    fft.forward(work.data());
    std::vector<double> terms(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) terms[i] = std::norm(work[i]);
    const double sum = pairwise_sum(std::span<const double>(terms));
    return sum * psi.grid.cell_volume() / static_cast<double>(psi.grid.size());
}

/// Raw expectation value sum conj(psi) * coord^power * psi * dV along one axis.
/// Not normalized by the state norm.
inline double coordinate_moment(const Wavefunction3& psi, int axis, int power = 1) {
    if (axis < 0 || axis > 2) throw shape_error("axis index out of range");
    const auto& ax = psi.grid.axes[static_cast<std::size_t>(axis)];
    const int n0 = psi.grid.axes[0].n_points;
    const int n1 = psi.grid.axes[1].n_points;
    const int n2 = psi.grid.axes[2].n_points;
    std::vector<double> coord_pow(static_cast<std::size_t>(ax.n_points));
    for (int i = 0; i < ax.n_points; ++i)
        coord_pow[static_cast<std::size_t>(i)] = std::pow(ax.coordinate(i), power);
    std::vector<double> terms(psi.amp.size());
    std::size_t idx = 0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k, ++idx) {
                const int m = axis == 0 ? i : (axis == 1 ? j : k);
                terms[idx] = std::norm(psi.amp[idx]) * coord_pow[static_cast<std::size_t>(m)];
            }
    return pairwise_sum(std::span<const double>(terms)) * psi.grid.cell_volume();
}

/// Spectral kinetic energy application: sum_axes (-1/2m) d^2/dx^2, exact for
/// every grid-resolved plane wave.
inline Wavefunction3 apply_kinetic(const Wavefunction3& psi, std::array<double, 3> masses) {
    for (double m : masses)
        if (!(m > 0.0)) throw domain_error("effective mass must be positive");
    const auto d = psi.grid.dims();
    FourierTransformer fft(std::span<const int>(d.data(), d.size()));
    Wavefunction3 out(psi.grid, psi.amp);
    fft.forward(out.amp.data());
    const auto kx = psi.grid.axes[0].wavenumbers();
    const auto k1 = psi.grid.axes[1].wavenumbers();
    const auto k2 = psi.grid.axes[2].wavenumbers();
    std::size_t idx = 0;
    for (int i = 0; i < d[0]; ++i) {
        const double tx = kx[static_cast<std::size_t>(i)] * kx[static_cast<std::size_t>(i)] /
                          (2.0 * masses[0]);
        for (int j = 0; j < d[1]; ++j) {
            const double t1 = tx + k1[static_cast<std::size_t>(j)] * k1[static_cast<std::size_t>(j)] /
                                       (2.0 * masses[1]);
            for (int k = 0; k < d[2]; ++k, ++idx) {
                const double t = t1 + k2[static_cast<std::size_t>(k)] * k2[static_cast<std::size_t>(k)] /
                                          (2.0 * masses[2]);
                out.amp[idx] *= t;
            }
        }
    }
    fft.backward(out.amp.data());
    return out;
}

/// Kinetic expectation <psi|T|psi> without forming T|psi> in position space.
inline double kinetic_expectation(const Wavefunction3& psi, std::array<double, 3> masses) {
    const auto d = psi.grid.dims();
    FourierTransformer fft(std::span<const int>(d.data(), d.size()));
    std::vector<cdouble> work = psi.amp;
    fft.forward(work.data());
    const auto kx = psi.grid.axes[0].wavenumbers();
    const auto k1 = psi.grid.axes[1].wavenumbers();
    const auto k2 = psi.grid.axes[2].wavenumbers();
    std::vector<double> terms(work.size());
    std::size_t idx = 0;
    for (int i = 0; i < d[0]; ++i)
        for (int j = 0; j < d[1]; ++j)
            for (int k = 0; k < d[2]; ++k, ++idx) {
                const double t =
                    kx[static_cast<std::size_t>(i)] * kx[static_cast<std::size_t>(i)] / (2.0 * masses[0]) +
                    k1[static_cast<std::size_t>(j)] * k1[static_cast<std::size_t>(j)] / (2.0 * masses[1]) +
                    k2[static_cast<std::size_t>(k)] * k2[static_cast<std::size_t>(k)] / (2.0 * masses[2]);
                terms[idx] = std::norm(work[idx]) * t;
            }
    const double sum = pairwise_sum(std::span<const double>(terms));
    return sum * psi.grid.cell_volume() / static_cast<double>(psi.grid.size());
}

}  // namespace qhhg
