#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qhhg/cap.hpp"
#include "qhhg/common.hpp"
#include "qhhg/fft.hpp"
#include "qhhg/grid.hpp"
#include "qhhg/model.hpp"
#include "qhhg/relax.hpp"

namespace qhhg {

// ---------------------------------------------------------------------------
// Initial state
// ---------------------------------------------------------------------------

struct GroundState {
    Wavefunction3 psi;             // ground orbital times the two vacuum Gaussians
    std::vector<cdouble> orbital;  // electronic ground orbital on the x axis
    double energy = 0.0;           // its eigenvalue
};

/// Relax the 1D electronic Hamiltonian (including the always-on x^2 term) and
/// tensor it with the analytic vacuum of each photon mode. Valid because the
/// interaction is off at t=0, making the Hamiltonian separable there.
inline GroundState ground_state(const ModelParams& params, const Grid3& grid,
                                double tol = 1e-10) {
    params.validate();
    const double sd = ModelParams::n_modes * params.lambda * params.lambda / 2.0;
    const bool with_sd = !params.self_dipole_enveloped;  // f(0)=0 kills it when enveloped
    auto electron_potential = [&](double x) {
        return params.potential(x) + (with_sd ? sd * x * x : 0.0);
    };
    RelaxOptions opts;
    opts.tol = tol;
    Relax1DResult relaxed = relax_ground_state_1d(grid.axes[0], electron_potential, opts);

    auto vacuum = [](const Axis& axis, double omega) {
        std::vector<double> g(static_cast<std::size_t>(axis.n_points));
        for (int i = 0; i < axis.n_points; ++i) {
            const double q = axis.coordinate(i);
            g[static_cast<std::size_t>(i)] = std::exp(-0.5 * omega * q * q);
        }
        double n2 = 0.0;
        for (double v : g) n2 += v * v;
        n2 *= axis.spacing;
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& v : g) v *= inv;
        return g;
    };
    const auto g1 = vacuum(grid.axes[1], params.omega_i());
    const auto g2 = vacuum(grid.axes[2], params.omega_j());

    GroundState out;
    out.energy = relaxed.energy;
    out.orbital = std::move(relaxed.orbital);
    out.psi = Wavefunction3(grid);
    std::size_t idx = 0;
    for (int i = 0; i < grid.axes[0].n_points; ++i) {
        const cdouble a = out.orbital[static_cast<std::size_t>(i)];
        for (int j = 0; j < grid.axes[1].n_points; ++j) {
            const cdouble b = a * g1[static_cast<std::size_t>(j)];
            for (int k = 0; k < grid.axes[2].n_points; ++k, ++idx)
                out.psi.amp[idx] = b * g2[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Real-time propagation
// ---------------------------------------------------------------------------

struct RunSpec {
    double dt = 0.05;
    int sample_stride = 4;      // record dipole/norm every this many steps
    bool cap_enabled = true;
    CapSpec cap{};
    bool cap_photon_axes = false;  // photon modes are harmonically confined; off by default
    double tail_cycles = 1.0;   // field-free time after t_s, in laser cycles
    double t_final = -1.0;      // <0: env.t_s + tail_cycles * tau_L
    int checkpoint_every = 0;   // steps between checkpoint callbacks; 0 = off

    void validate() const {
        if (!(dt > 0.0)) throw config_error("dt must be positive");
        if (sample_stride < 1) throw config_error("sample stride must be >= 1");
        if (tail_cycles < 0.0) throw config_error("tail must be non-negative");
    }
};

/// Time series of <x>(t) and survival probability over a run.
struct DipoleRecord {
    std::vector<double> times;
    std::vector<double> dipole;
    std::vector<double> norm;  // squared L2 norm of the surviving wavefunction
};

struct RunResult {
    Wavefunction3 psi;
    DipoleRecord record;
    double final_time = 0.0;
    long steps = 0;
    std::vector<std::string> warnings;
};

/// Strang-split spectral stepper for the driven electron-photon system.
///
/// Each step applies exp(-i dt/2 U(t_mid)) F^-1 exp(-i dt T) F
/// exp(-i dt/2 U(t_mid)) with the full position-diagonal energy U in both
/// half phases and the absorbing masks folded into the trailing one. The
/// bilinear x*q interaction factors into per-(x,q) tables rebuilt each step
/// by phase recurrences, so no complex exponentials appear in the grid loop.
class Propagator {
  public:
    Propagator(const ModelParams& params, const Grid3& grid, const RunSpec& spec)
        : params_(params), grid_(grid), spec_(spec), psi_(grid), fft_(make_fft(grid)) {
        params_.validate();
        spec_.validate();
        build_static_tables();
    }

    void set_state(const Wavefunction3& psi) {
        if (!(psi.grid == grid_)) throw shape_error("state grid does not match propagator grid");
        psi_ = psi;
    }

    /// Resume hook: restores the step counter and the record accumulated so far.
    void set_progress(long step_index, DipoleRecord partial) {
        step_index_ = step_index;
        record_ = std::move(partial);
    }

    const Wavefunction3& state() const { return psi_; }
    const DipoleRecord& record() const { return record_; }
    const ModelParams& params() const { return params_; }
    const RunSpec& spec() const { return spec_; }
    long step_index() const { return step_index_; }
    double time() const { return static_cast<double>(step_index_) * spec_.dt; }
    double t_final() const {
        return spec_.t_final > 0.0 ? spec_.t_final
                                   : params_.env.t_s + spec_.tail_cycles * params_.tau_L();
    }
    long total_steps() const {
        return static_cast<long>(std::ceil(t_final() / spec_.dt - 1e-9));
    }

    /// One Strang step from the current time.
    void step() {
        const double dt = spec_.dt;
        const double t_mid = time() + 0.5 * dt;
        const double f = envelope(t_mid, params_.env);
        const double drive = f * params_.e0 * std::cos(params_.omega_L * t_mid);
        build_step_tables(f, drive, dt);

        apply_diagonal(lead_xq1_, lead_xq2_);
        fft_.forward(psi_.amp.data());
        apply_kinetic_phases();
        fft_.backward_unnormalized(psi_.amp.data());  // 1/N folded into kin_x_
        apply_diagonal(trail_xq1_, trail_xq2_);

        ++step_index_;
    }

    /// Propagate to t_final, sampling as configured. The callback, when set,
    /// fires every checkpoint_every steps (sweep code writes the file).
    RunResult run(const std::function<void(const Propagator&)>& on_checkpoint = {}) {
        const long n_steps = total_steps();
        if (record_.times.empty() && step_index_ == 0) sample();
        bool norm_warned = false;
        RunResult out;
        while (step_index_ < n_steps) {
            step();
            if (step_index_ % spec_.sample_stride == 0 || step_index_ == n_steps) sample();
            if (!record_.norm.empty()) {
                const double n2 = record_.norm.back();
                if (!std::isfinite(n2))
                    throw numerical_error("propagation produced NaN at t=" + std::to_string(time()));
                if (!norm_warned && n2 < 0.25) {
                    out.warnings.push_back("survival probability fell below 25% (norm loss > 50%); "
                                           "check box size and CAP settings");
                    norm_warned = true;
                }
            }
            if (spec_.checkpoint_every > 0 && on_checkpoint &&
                step_index_ % spec_.checkpoint_every == 0 && step_index_ < n_steps)
                on_checkpoint(*this);
        }
        out.final_time = time();
        out.steps = step_index_;
        out.record = std::move(record_);
        out.psi = std::move(psi_);
        return out;
    }

  private:
    static FourierTransformer make_fft(const Grid3& grid) {
        const auto d = grid.dims();
        return FourierTransformer(std::span<const int>(d.data(), d.size()));
    }

    void build_static_tables() {
        tables_ = hamiltonian_tables(params_, grid_);
        const double dt = spec_.dt;
        const int nx = grid_.axes[0].n_points;
        const int n1 = grid_.axes[1].n_points;
        const int n2 = grid_.axes[2].n_points;

        phase_x_.resize(static_cast<std::size_t>(nx));
        for (int i = 0; i < nx; ++i)
            phase_x_[static_cast<std::size_t>(i)] =
                std::polar(1.0, -0.5 * dt * tables_.static_x[static_cast<std::size_t>(i)]);
        phase_q1_.resize(static_cast<std::size_t>(n1));
        for (int j = 0; j < n1; ++j)
            phase_q1_[static_cast<std::size_t>(j)] =
                std::polar(1.0, -0.5 * dt * tables_.static_q1[static_cast<std::size_t>(j)]);
        phase_q2_.resize(static_cast<std::size_t>(n2));
        for (int k = 0; k < n2; ++k)
            phase_q2_[static_cast<std::size_t>(k)] =
                std::polar(1.0, -0.5 * dt * tables_.static_q2[static_cast<std::size_t>(k)]);

        const double inv_n = 1.0 / static_cast<double>(grid_.size());
        kin_x_.resize(static_cast<std::size_t>(nx));
        for (int i = 0; i < nx; ++i) {
            const double k = grid_.axes[0].wavenumber(i);
            kin_x_[static_cast<std::size_t>(i)] = std::polar(inv_n, -dt * 0.5 * k * k);
        }
        kin_q1_.resize(static_cast<std::size_t>(n1));
        for (int j = 0; j < n1; ++j) {
            const double k = grid_.axes[1].wavenumber(j);
            kin_q1_[static_cast<std::size_t>(j)] = std::polar(1.0, -dt * 0.5 * k * k);
        }
        kin_q2_.resize(static_cast<std::size_t>(n2));
        for (int k = 0; k < n2; ++k) {
            const double kk = grid_.axes[2].wavenumber(k);
            kin_q2_[static_cast<std::size_t>(k)] = std::polar(1.0, -dt * 0.5 * kk * kk);
        }

        mask_x_.assign(static_cast<std::size_t>(nx), 1.0);
        mask_q1_.assign(static_cast<std::size_t>(n1), 1.0);
        mask_q2_.assign(static_cast<std::size_t>(n2), 1.0);
        if (spec_.cap_enabled) {
            mask_x_ = cap_mask(grid_.axes[0], spec_.cap, dt);
            if (spec_.cap_photon_axes) {
                mask_q1_ = cap_mask(grid_.axes[1], spec_.cap, dt);
                mask_q2_ = cap_mask(grid_.axes[2], spec_.cap, dt);
            }
        }
        if (params_.quiver_absorber) {
            const double lq = params_.quiver_length();
            const auto qm = quiver_mask(grid_.axes[0], lq, params_.quiver_ramp,
                                        spec_.cap.strength, dt);
            for (std::size_t i = 0; i < mask_x_.size(); ++i) mask_x_[i] *= qm[i];
        }

        lead_xq1_.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(n1));
        trail_xq1_.resize(lead_xq1_.size());
        lead_xq2_.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(n2));
        trail_xq2_.resize(lead_xq2_.size());
    }

    /// Fill exp(-i a * x_i * q_j) tables by a phase recurrence along q.
    static void fill_bilinear(std::vector<cdouble>& out, const Axis& xaxis, const Axis& qaxis,
                              double a) {
        const int nx = xaxis.n_points;
        const int nq = qaxis.n_points;
        for (int i = 0; i < nx; ++i) {
            const double x = xaxis.coordinate(i);
            cdouble cur = std::polar(1.0, -a * x * qaxis.coordinate(0));
            const cdouble ratio = std::polar(1.0, -a * x * qaxis.spacing);
            cdouble* row = out.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(nq);
            for (int j = 0; j < nq; ++j) {
                row[j] = cur;
                cur *= ratio;
            }
        }
    }

    void build_step_tables(double f, double drive, double dt) {
        const int nx = grid_.axes[0].n_points;
        const int n1 = grid_.axes[1].n_points;
        const int n2 = grid_.axes[2].n_points;
        fill_bilinear(lead_xq1_, grid_.axes[0], grid_.axes[1], 0.5 * dt * f * tables_.couple_q1);
        fill_bilinear(lead_xq2_, grid_.axes[0], grid_.axes[2], 0.5 * dt * f * tables_.couple_q2);

        // fold x-only phases (static + drive [+ enveloped self-dipole]) into the
        // x*q1 table, per-axis static phases into their tables, masks into trail.
        for (int i = 0; i < nx; ++i) {
            const double x = grid_.axes[0].coordinate(i);
            double ex = drive * x;
            if (params_.self_dipole_enveloped)
                ex += f * f * tables_.self_dipole_x[static_cast<std::size_t>(i)];
            const cdouble xfac = phase_x_[static_cast<std::size_t>(i)] * std::polar(1.0, -0.5 * dt * ex);
            cdouble* lead = lead_xq1_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n1);
            cdouble* trail = trail_xq1_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n1);
            const double mx = mask_x_[static_cast<std::size_t>(i)];
            for (int j = 0; j < n1; ++j) {
                const cdouble base = lead[j] * xfac * phase_q1_[static_cast<std::size_t>(j)];
                lead[j] = base;
                trail[j] = base * (mx * mask_q1_[static_cast<std::size_t>(j)]);
            }
            cdouble* lead2 = lead_xq2_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n2);
            cdouble* trail2 = trail_xq2_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n2);
            for (int k = 0; k < n2; ++k) {
                const cdouble base = lead2[k] * phase_q2_[static_cast<std::size_t>(k)];
                lead2[k] = base;
                trail2[k] = base * mask_q2_[static_cast<std::size_t>(k)];
            }
        }
    }

    void apply_diagonal(const std::vector<cdouble>& xq1, const std::vector<cdouble>& xq2) {
        const int nx = grid_.axes[0].n_points;
        const int n1 = grid_.axes[1].n_points;
        const int n2 = grid_.axes[2].n_points;
        cdouble* amp = psi_.amp.data();
        for (int i = 0; i < nx; ++i) {
            const cdouble* row1 = xq1.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n1);
            const cdouble* row2 = xq2.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n2);
            for (int j = 0; j < n1; ++j) {
                const cdouble a = row1[j];
                cdouble* cell = amp + (static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) +
                                       static_cast<std::size_t>(j)) *
                                          static_cast<std::size_t>(n2);
                for (int k = 0; k < n2; ++k) cell[k] *= a * row2[k];
            }
        }
    }

    void apply_kinetic_phases() {
        const int nx = grid_.axes[0].n_points;
        const int n1 = grid_.axes[1].n_points;
        const int n2 = grid_.axes[2].n_points;
        cdouble* amp = psi_.amp.data();
        for (int i = 0; i < nx; ++i) {
            const cdouble kx = kin_x_[static_cast<std::size_t>(i)];
            for (int j = 0; j < n1; ++j) {
                const cdouble kxj = kx * kin_q1_[static_cast<std::size_t>(j)];
                cdouble* cell = amp + (static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) +
                                       static_cast<std::size_t>(j)) *
                                          static_cast<std::size_t>(n2);
                for (int k = 0; k < n2; ++k) cell[k] *= kxj * kin_q2_[static_cast<std::size_t>(k)];
            }
        }
    }

    void sample() {
        const int nx = grid_.axes[0].n_points;
        const std::size_t plane = grid_.plane_size();
        const double dv = grid_.cell_volume();
        double n2 = 0.0;
        double dip = 0.0;
        for (int i = 0; i < nx; ++i) {
            const cdouble* cell = psi_.amp.data() + static_cast<std::size_t>(i) * plane;
            double plane_norm = 0.0;
            for (std::size_t m = 0; m < plane; ++m) plane_norm += std::norm(cell[m]);
            n2 += plane_norm;
            dip += plane_norm * grid_.axes[0].coordinate(i);
        }
        record_.times.push_back(time());
        record_.dipole.push_back(dip * dv);
        record_.norm.push_back(n2 * dv);
    }

    ModelParams params_;
    Grid3 grid_;
    RunSpec spec_;
    Wavefunction3 psi_;
    FourierTransformer fft_;
    HamiltonianTables tables_;
    long step_index_ = 0;
    DipoleRecord record_;

    std::vector<cdouble> phase_x_, phase_q1_, phase_q2_;
    std::vector<cdouble> kin_x_, kin_q1_, kin_q2_;
    std::vector<double> mask_x_, mask_q1_, mask_q2_;
    std::vector<cdouble> lead_xq1_, lead_xq2_, trail_xq1_, trail_xq2_;
};

/// Prepare the ground state and propagate through the full pulse.
inline RunResult run(const ModelParams& params, const Grid3& grid, const RunSpec& spec,
                     const std::function<void(const Propagator&)>& on_checkpoint = {}) {
    GroundState gs = ground_state(params, grid);
    Propagator prop(params, grid, spec);
    prop.set_state(gs.psi);
    return prop.run(on_checkpoint);
}

}  // namespace qhhg
