#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "qhhg/common.hpp"
#include "qhhg/grid.hpp"

namespace qhhg {

// ---------------------------------------------------------------------------
// Atomic potentials
// ---------------------------------------------------------------------------

enum class PotentialKind { SoftCoulomb, GaussianWell, ScreenedSoftCoulomb };

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::SoftCoulomb: return "soft_coulomb";
        case PotentialKind::GaussianWell: return "gaussian_well";
        case PotentialKind::ScreenedSoftCoulomb: return "screened_soft_coulomb";
    }
    return "?";
}

inline PotentialKind potential_kind_from_string(const std::string& s) {
    if (s == "soft_coulomb") return PotentialKind::SoftCoulomb;
    if (s == "gaussian_well") return PotentialKind::GaussianWell;
    if (s == "screened_soft_coulomb") return PotentialKind::ScreenedSoftCoulomb;
    throw config_error("unknown potential kind '" + s + "'");
}

/// One of the three single-active-electron model potentials. All are even,
/// negative, bounded below, and vanish at large |x|.
struct Potential {
    PotentialKind kind = PotentialKind::SoftCoulomb;
    double soft_b = 0.816;        // soft-Coulomb softening length
    double gauss_depth = 1.17946; // short-range Gaussian well depth
    double gauss_alpha = 0.347;   // and inverse-width

    double operator()(double x) const {
        switch (kind) {
            case PotentialKind::SoftCoulomb:
                return -1.0 / std::sqrt(soft_b * soft_b + x * x);
            case PotentialKind::GaussianWell:
                return -gauss_depth * std::exp(-gauss_alpha * x * x);
            case PotentialKind::ScreenedSoftCoulomb:
                return -(1.0 + std::exp(-x * x)) / std::sqrt(x * x + 1.9396);
        }
        return 0.0;
    }

    void validate() const {
        if (!(soft_b > 0.0)) throw config_error("softening parameter must be positive");
        if (!(gauss_depth > 0.0) || !(gauss_alpha > 0.0))
            throw config_error("gaussian well parameters must be positive");
    }

    bool operator==(const Potential&) const = default;
};

inline double potential_eval(const Potential& p, double x) { return p(x); }

// ---------------------------------------------------------------------------
// Pulse envelope
// ---------------------------------------------------------------------------

/// Ramp / plateau / ramp-down times in absolute atomic units. The ramp-down
/// has the same duration as the ramp-up (t_s - t_d == t_r), which is what
/// makes the envelope reach exactly zero at t_s.
struct EnvelopeTimes {
    double t_r = 0.0;
    double t_d = 0.0;
    double t_s = 0.0;

    static EnvelopeTimes from_cycles(double omega_L, double cr = 2.5, double cd = 5.5,
                                     double cs = 8.0) {
        const double tau = 2.0 * kPi / omega_L;
        EnvelopeTimes env{cr * tau, cd * tau, cs * tau};
        env.validate();
        return env;
    }

    void validate() const {
        if (!(t_r > 0.0 && t_r < t_d && t_d < t_s))
            throw config_error("envelope times must satisfy 0 < t_r < t_d < t_s");
        const double mismatch = std::abs((t_s - t_d) - t_r);
        if (mismatch > 1e-9 * t_s)
            throw config_error("envelope ramp-down must last t_r (t_s - t_d == t_r)");
    }

    bool operator==(const EnvelopeTimes&) const = default;
};

/// sin^2 ramp-up, unit plateau, cos^2 ramp-down; 0 outside [0, t_s].
/// C^1 at both plateau joins.
inline double envelope(double t, const EnvelopeTimes& env) {
    env.validate();
    if (t <= 0.0 || t >= env.t_s) return 0.0;
    if (t < env.t_r) {
        const double s = std::sin(kPi * t / (2.0 * env.t_r));
        return s * s;
    }
    if (t <= env.t_d) return 1.0;
    const double c = std::cos(kPi * (t - env.t_d) / (2.0 * env.t_r));
    return c * c;
}

// ---------------------------------------------------------------------------
// Intensity conversion
// ---------------------------------------------------------------------------

/// Peak field amplitude in a.u. for an intensity in W/cm^2.
inline double field_from_intensity(double intensity_wcm2) {
    if (intensity_wcm2 < 0.0) throw domain_error("intensity must be non-negative");
    return std::sqrt(intensity_wcm2 / kAtomicIntensityWcm2);
}

inline double intensity_from_field(double e0) {
    if (e0 < 0.0) throw domain_error("field amplitude must be non-negative");
    return e0 * e0 * kAtomicIntensityWcm2;
}

// ---------------------------------------------------------------------------
// Full model parameter set
// ---------------------------------------------------------------------------

/// Everything that defines one light-matter simulation: laser, atom, the two
/// retained photon modes, coupling, and envelope.
struct ModelParams {
    double omega_L = 0.057;       // driving laser frequency (a.u.)
    int harmonic_p = 3;           // first retained harmonic order (odd)
    int harmonic_q = 5;           // second retained harmonic order (odd)
    double lambda = 0.01;         // light-matter coupling sqrt(8*pi/L_C)
    Potential potential{};
    double e0 = 0.0;              // peak drive amplitude (a.u.)
    EnvelopeTimes env = EnvelopeTimes::from_cycles(0.057);
    bool quiver_absorber = false; // extra absorbing mask at |x| = E0/omega_L^2
    double quiver_ramp = 8.0;     // ramp width of that mask (a.u.)
    bool self_dipole_enveloped = false; // multiply the x^2 term by f(t)^2

    static constexpr int n_modes = 2;

    double tau_L() const { return 2.0 * kPi / omega_L; }
    double omega_i() const { return harmonic_p * omega_L; }
    double omega_j() const { return harmonic_q * omega_L; }
    /// Vacuum position width 1/sqrt(2*omega) of a mode.
    double sigma_i() const { return 1.0 / std::sqrt(2.0 * omega_i()); }
    double sigma_j() const { return 1.0 / std::sqrt(2.0 * omega_j()); }
    double quiver_length() const { return std::abs(e0) / (omega_L * omega_L); }

    void validate() const {
        if (!(omega_L > 0.0)) throw config_error("omega_L must be positive");
        if (!(lambda > 0.0)) throw config_error("coupling lambda must be positive");
        if (harmonic_p <= 0 || harmonic_q <= 0 || harmonic_p % 2 == 0 || harmonic_q % 2 == 0)
            throw config_error("harmonic orders must be odd positive integers");
        if (harmonic_p == harmonic_q) throw config_error("harmonic orders must be distinct");
        // e0 is signed here so the drive-flip symmetry can be exercised;
        // intensity-derived amplitudes are always non-negative.
        if (!std::isfinite(e0)) throw config_error("E0 must be finite");
        if (!(quiver_ramp > 0.0)) throw config_error("quiver ramp width must be positive");
        potential.validate();
        env.validate();
    }

    /// Canonical text form, used for hashing and for the run manifest.
    std::string canonical_string() const {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "omega_L=%.17g;p=%d;q=%d;lambda=%.17g;potential=%s;b=%.17g;"
                      "gauss=%.17g,%.17g;E0=%.17g;env=%.17g,%.17g,%.17g;quiver=%d;"
                      "quiver_ramp=%.17g;sd_env=%d",
                      omega_L, harmonic_p, harmonic_q, lambda, to_string(potential.kind),
                      potential.soft_b, potential.gauss_depth, potential.gauss_alpha, e0,
                      env.t_r, env.t_d, env.t_s, quiver_absorber ? 1 : 0, quiver_ramp,
                      self_dipole_enveloped ? 1 : 0);
        return buf;
    }
    std::uint64_t hash() const { return fnv1a64(canonical_string()); }

    bool operator==(const ModelParams&) const = default;
};

// ---------------------------------------------------------------------------
// Position-diagonal Hamiltonian pieces
// ---------------------------------------------------------------------------

/// Factored form of the position-diagonal energy. The static part separates
/// per axis; the interaction contributes bilinear x*q terms with constant
/// coefficients lambda*omega_n plus the classical drive along x. Kinetic
/// prescription: unit mass on all three axes.
struct HamiltonianTables {
    std::vector<double> static_x;   // V(x) [+ n_modes*lambda^2/2 * x^2 unless enveloped]
    std::vector<double> static_q1;  // 0.5 * omega_i^2 * q1^2
    std::vector<double> static_q2;  // 0.5 * omega_j^2 * q2^2
    std::vector<double> self_dipole_x;  // n_modes*lambda^2/2 * x^2 (used when enveloped)
    double couple_q1 = 0.0;         // lambda * omega_i
    double couple_q2 = 0.0;         // lambda * omega_j
};

inline HamiltonianTables hamiltonian_tables(const ModelParams& params, const Grid3& grid) {
    params.validate();
    HamiltonianTables tab;
    const Axis& ax = grid.axes[0];
    const Axis& a1 = grid.axes[1];
    const Axis& a2 = grid.axes[2];
    const double sd = ModelParams::n_modes * params.lambda * params.lambda / 2.0;
    tab.static_x.resize(static_cast<std::size_t>(ax.n_points));
    tab.self_dipole_x.resize(static_cast<std::size_t>(ax.n_points));
    for (int i = 0; i < ax.n_points; ++i) {
        const double x = ax.coordinate(i);
        tab.self_dipole_x[static_cast<std::size_t>(i)] = sd * x * x;
        tab.static_x[static_cast<std::size_t>(i)] =
            params.potential(x) + (params.self_dipole_enveloped ? 0.0 : sd * x * x);
    }
    const double wi = params.omega_i();
    const double wj = params.omega_j();
    tab.static_q1.resize(static_cast<std::size_t>(a1.n_points));
    for (int j = 0; j < a1.n_points; ++j) {
        const double q = a1.coordinate(j);
        tab.static_q1[static_cast<std::size_t>(j)] = 0.5 * wi * wi * q * q;
    }
    tab.static_q2.resize(static_cast<std::size_t>(a2.n_points));
    for (int k = 0; k < a2.n_points; ++k) {
        const double q = a2.coordinate(k);
        tab.static_q2[static_cast<std::size_t>(k)] = 0.5 * wj * wj * q * q;
    }
    tab.couple_q1 = params.lambda * wi;
    tab.couple_q2 = params.lambda * wj;
    return tab;
}

/// Full position-diagonal energy at time t over the whole grid. Intended for
/// tests and small grids; the propagator uses the factored tables directly.
inline std::vector<double> hamiltonian_diagonal(const ModelParams& params, const Grid3& grid,
                                                double t) {
    const HamiltonianTables tab = hamiltonian_tables(params, grid);
    const double f = envelope(t, params.env);
    const double drive = f * params.e0 * std::cos(params.omega_L * t);
    std::vector<double> diag(grid.size());
    std::size_t idx = 0;
    for (int i = 0; i < grid.axes[0].n_points; ++i) {
        const double x = grid.axes[0].coordinate(i);
        const double vx = tab.static_x[static_cast<std::size_t>(i)] +
                          (params.self_dipole_enveloped
                               ? f * f * tab.self_dipole_x[static_cast<std::size_t>(i)]
                               : 0.0) +
                          drive * x;
        for (int j = 0; j < grid.axes[1].n_points; ++j) {
            const double v1 = vx + tab.static_q1[static_cast<std::size_t>(j)] +
                              f * tab.couple_q1 * x * grid.axes[1].coordinate(j);
            for (int k = 0; k < grid.axes[2].n_points; ++k, ++idx) {
                diag[idx] = v1 + tab.static_q2[static_cast<std::size_t>(k)] +
                            f * tab.couple_q2 * x * grid.axes[2].coordinate(k);
            }
        }
    }
    return diag;
}

}  // namespace qhhg
