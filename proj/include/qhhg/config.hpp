#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qhhg/common.hpp"
#include "qhhg/model.hpp"
#include "qhhg/photonics.hpp"
#include "qhhg/propagation.hpp"
#include "qhhg/spectrum.hpp"
#include "qhhg/toml.hpp"

namespace qhhg {

struct GridConfig {
    int electron_points = 512;
    double electron_spacing = 0.4;
    int photon_points = 48;
    double photon_spacing = 0.0;       // a.u.; 0 means derive from the extent below
    double photon_extent_sigmas = 10.0;  // half-extent in vacuum widths of each mode
};

struct IntensityGrid {
    double min = 0.32e14;
    double max = 2.0e14;
    int count = 24;
    bool log_spacing = true;

    void validate() const {
        if (min < 0.0 || !(max >= min)) throw config_error("bad intensity range");
        if (count < 1) throw config_error("intensity count must be >= 1");
        if (log_spacing && count > 1 && !(min > 0.0))
            throw config_error("log-spaced intensities need a positive minimum");
    }

    std::vector<double> values() const {
        validate();
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        if (count == 1) {
            out.push_back(min);
            return out;
        }
        for (int m = 0; m < count; ++m) {
            const double t = static_cast<double>(m) / (count - 1);
            out.push_back(log_spacing ? min * std::pow(max / min, t) : min + (max - min) * t);
        }
        return out;
    }
};

struct FocalConfig {
    double i_min = 0.32e14;
    std::vector<double> i0_list;  // empty: use every swept node with enough window
};

/// Full description of one sweep: model, discretization, intensity grid,
/// focal averaging, and output behavior.
struct SweepConfig {
    ModelParams model;  // e0 is ignored here; it is set per intensity
    GridConfig grid;
    double dt = 0.05;
    int sample_stride = 4;
    double tail_cycles = 1.0;
    bool cap_enabled = true;
    CapSpec cap{};
    bool cap_photon_axes = false;
    AnalysisOptions photonics{};
    IntensityGrid intensities{};
    FocalConfig focal{};
    std::string output_dir = "out";
    int jobs = 1;
    int checkpoint_every = 0;
    bool write_spectra = true;
    bool write_dipoles = true;
    SpectrumWindow window = SpectrumWindow::Envelope;

    void validate() const {
        model.validate();
        intensities.validate();
        if (!(dt > 0.0)) throw config_error("dt must be positive");
        if (sample_stride < 1) throw config_error("sample_stride must be >= 1");
        if (grid.electron_points < 8 || grid.photon_points < 8)
            throw config_error("grid axes need at least 8 points");
        if (!(grid.electron_spacing > 0.0)) throw config_error("electron spacing must be positive");
        if (grid.photon_spacing < 0.0) throw config_error("photon spacing must be non-negative");
        if (grid.photon_spacing == 0.0 && !(grid.photon_extent_sigmas > 0.0))
            throw config_error("photon extent must be positive");
        if (jobs < 1) throw config_error("jobs must be >= 1");
        if (photonics.n_max < 1) throw config_error("n_max must be >= 1");
        if (!(focal.i_min > 0.0)) throw config_error("focal I_min must be positive");
        for (double i0 : focal.i0_list)
            if (i0 > intensities.max * (1.0 + 1e-12))
                throw config_error("focal I0 exceeds the swept intensity range");
    }

    Axis photon_axis(double omega) const {
        const double sigma = 1.0 / std::sqrt(2.0 * omega);
        const double dq = grid.photon_spacing > 0.0
                              ? grid.photon_spacing
                              : 2.0 * grid.photon_extent_sigmas * sigma / grid.photon_points;
        return Axis::centered(grid.photon_points, dq);
    }

    Grid3 make_grid3() const {
        return make_grid(Axis::centered(grid.electron_points, grid.electron_spacing),
                         photon_axis(model.omega_i()), photon_axis(model.omega_j()));
    }

    ModelParams params_for_intensity(double intensity) const {
        ModelParams p = model;
        p.e0 = field_from_intensity(intensity);
        return p;
    }

    RunSpec run_spec() const {
        RunSpec s;
        s.dt = dt;
        s.sample_stride = sample_stride;
        s.cap_enabled = cap_enabled;
        s.cap = cap;
        s.cap_photon_axes = cap_photon_axes;
        s.tail_cycles = tail_cycles;
        s.checkpoint_every = checkpoint_every;
        return s;
    }

    /// Peak intensities the focal table is evaluated at.
    std::vector<double> focal_i0_values() const {
        if (!focal.i0_list.empty()) return focal.i0_list;
        std::vector<double> out;
        for (double intensity : intensities.values())
            if (intensity > focal.i_min * (1.0 + 1e-12)) out.push_back(intensity);
        return out;
    }

    std::string canonical() const {
        std::ostringstream s;
        s << "model{" << model.canonical_string() << "}";
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      ";grid{%d,%.17g,%d,%.17g,%.17g};time{%.17g,%d,%.17g};cap{%d,%.17g,%.17g,%d}"
                      ";fock{%d,%d};I{%.17g,%.17g,%d,%d};focal{%.17g}",
                      grid.electron_points, grid.electron_spacing, grid.photon_points,
                      grid.photon_spacing, grid.photon_extent_sigmas, dt, sample_stride,
                      tail_cycles, cap_enabled ? 1 : 0, cap.width, cap.strength,
                      cap_photon_axes ? 1 : 0, photonics.n_max, photonics.auto_double ? 1 : 0,
                      intensities.min, intensities.max, intensities.count,
                      intensities.log_spacing ? 1 : 0, focal.i_min);
        s << buf;
        for (double i0 : focal.i0_list) s << "," << i0;
        return s.str();
    }
    std::uint64_t hash() const { return fnv1a64(canonical()); }
};

namespace configdetail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "model.omega_L", "model.harmonics", "model.lambda", "model.potential", "model.soft_b",
        "model.envelope_cycles", "model.quiver_absorber", "model.quiver_ramp",
        "model.self_dipole_enveloped",
        "grid.electron_points", "grid.electron_spacing", "grid.photon_points",
        "grid.photon_spacing", "grid.photon_extent_sigmas",
        "time.dt", "time.sample_stride", "time.tail_cycles",
        "cap.enabled", "cap.width", "cap.strength", "cap.photon_axes",
        "photonics.n_max", "photonics.auto_n_max",
        "intensities.min", "intensities.max", "intensities.count", "intensities.spacing",
        "focal.i_min", "focal.i0_list",
        "run.output_dir", "run.jobs", "run.checkpoint_every", "run.write_spectra",
        "run.write_dipoles", "run.spectrum_window"};
    return keys;
}

inline void apply_model_keys(const minitoml::Table& t, ModelParams& model,
                             const std::string& prefix = "model.") {
    model.omega_L = minitoml::get_double(t, prefix + "omega_L", model.omega_L);
    model.lambda = minitoml::get_double(t, prefix + "lambda", model.lambda);
    if (const auto* v = minitoml::find(t, prefix + "potential"))
        model.potential.kind = potential_kind_from_string(v->as_string());
    model.potential.soft_b = minitoml::get_double(t, prefix + "soft_b", model.potential.soft_b);
    if (const auto* v = minitoml::find(t, prefix + "harmonics")) {
        if (v->kind != minitoml::Value::Kind::Array || v->arr.size() != 2)
            throw config_error("harmonics must be a pair like [3, 5]");
        model.harmonic_p = static_cast<int>(v->arr[0].as_int());
        model.harmonic_q = static_cast<int>(v->arr[1].as_int());
    }
    std::vector<double> cycles = minitoml::get_double_array(t, prefix + "envelope_cycles");
    if (!cycles.empty()) {
        if (cycles.size() != 3) throw config_error("envelope_cycles must be [ramp, down, stop]");
        model.env = EnvelopeTimes::from_cycles(model.omega_L, cycles[0], cycles[1], cycles[2]);
    } else {
        model.env = EnvelopeTimes::from_cycles(model.omega_L);
    }
    model.quiver_absorber =
        minitoml::get_bool(t, prefix + "quiver_absorber", model.quiver_absorber);
    model.quiver_ramp = minitoml::get_double(t, prefix + "quiver_ramp", model.quiver_ramp);
    model.self_dipole_enveloped =
        minitoml::get_bool(t, prefix + "self_dipole_enveloped", model.self_dipole_enveloped);
}

}  // namespace configdetail

inline SweepConfig sweep_config_from_document(const minitoml::Document& doc) {
    for (const auto& [key, value] : doc.root)
        if (configdetail::known_keys().count(key) == 0)
            throw config_error("unknown configuration key '" + key + "'");

    SweepConfig cfg;
    const minitoml::Table& t = doc.root;
    configdetail::apply_model_keys(t, cfg.model);

    cfg.grid.electron_points =
        static_cast<int>(minitoml::get_int(t, "grid.electron_points", cfg.grid.electron_points));
    cfg.grid.electron_spacing =
        minitoml::get_double(t, "grid.electron_spacing", cfg.grid.electron_spacing);
    cfg.grid.photon_points =
        static_cast<int>(minitoml::get_int(t, "grid.photon_points", cfg.grid.photon_points));
    cfg.grid.photon_spacing =
        minitoml::get_double(t, "grid.photon_spacing", cfg.grid.photon_spacing);
    cfg.grid.photon_extent_sigmas =
        minitoml::get_double(t, "grid.photon_extent_sigmas", cfg.grid.photon_extent_sigmas);

    cfg.dt = minitoml::get_double(t, "time.dt", cfg.dt);
    cfg.sample_stride =
        static_cast<int>(minitoml::get_int(t, "time.sample_stride", cfg.sample_stride));
    cfg.tail_cycles = minitoml::get_double(t, "time.tail_cycles", cfg.tail_cycles);

    cfg.cap_enabled = minitoml::get_bool(t, "cap.enabled", cfg.cap_enabled);
    cfg.cap.width = minitoml::get_double(t, "cap.width", cfg.cap.width);
    cfg.cap.strength = minitoml::get_double(t, "cap.strength", cfg.cap.strength);
    cfg.cap_photon_axes = minitoml::get_bool(t, "cap.photon_axes", cfg.cap_photon_axes);

    cfg.photonics.n_max =
        static_cast<int>(minitoml::get_int(t, "photonics.n_max", cfg.photonics.n_max));
    cfg.photonics.auto_double =
        minitoml::get_bool(t, "photonics.auto_n_max", cfg.photonics.auto_double);

    cfg.intensities.min = minitoml::get_double(t, "intensities.min", cfg.intensities.min);
    cfg.intensities.max = minitoml::get_double(t, "intensities.max", cfg.intensities.max);
    cfg.intensities.count =
        static_cast<int>(minitoml::get_int(t, "intensities.count", cfg.intensities.count));
    const std::string spacing = minitoml::get_string(t, "intensities.spacing", "log");
    if (spacing != "log" && spacing != "linear")
        throw config_error("intensities.spacing must be 'log' or 'linear'");
    cfg.intensities.log_spacing = spacing == "log";

    cfg.focal.i_min = minitoml::get_double(t, "focal.i_min", cfg.focal.i_min);
    cfg.focal.i0_list = minitoml::get_double_array(t, "focal.i0_list");

    cfg.output_dir = minitoml::get_string(t, "run.output_dir", cfg.output_dir);
    cfg.jobs = static_cast<int>(minitoml::get_int(t, "run.jobs", cfg.jobs));
    cfg.checkpoint_every =
        static_cast<int>(minitoml::get_int(t, "run.checkpoint_every", cfg.checkpoint_every));
    cfg.write_spectra = minitoml::get_bool(t, "run.write_spectra", cfg.write_spectra);
    cfg.write_dipoles = minitoml::get_bool(t, "run.write_dipoles", cfg.write_dipoles);
    cfg.window = spectrum_window_from_string(
        minitoml::get_string(t, "run.spectrum_window", to_string(cfg.window)));

    cfg.validate();
    return cfg;
}

inline SweepConfig sweep_config_from_file(const std::string& path) {
    return sweep_config_from_document(minitoml::parse_file(path));
}

// ---------------------------------------------------------------------------
// Variant matrices
// ---------------------------------------------------------------------------

/// One model variation: a tagged override of the potential, the quiver
/// absorber, or the coupling.
struct VariantSpec {
    std::string tag;
    std::optional<PotentialKind> potential;
    std::optional<double> soft_b;
    std::optional<bool> quiver_absorber;
    std::optional<double> lambda;

    SweepConfig apply(const SweepConfig& base) const {
        SweepConfig cfg = base;
        if (potential) cfg.model.potential.kind = *potential;
        if (soft_b) cfg.model.potential.soft_b = *soft_b;
        if (quiver_absorber) cfg.model.quiver_absorber = *quiver_absorber;
        if (lambda) cfg.model.lambda = *lambda;
        cfg.validate();
        return cfg;
    }
};

inline std::vector<VariantSpec> variants_from_document(const minitoml::Document& doc) {
    std::vector<VariantSpec> out;
    for (const auto& [name, table] : doc.table_arrays) {
        if (name != "variant") throw config_error("variants file only holds [[variant]] blocks");
        VariantSpec v;
        v.tag = minitoml::get_string(table, "tag", "");
        if (v.tag.empty()) throw config_error("every variant needs a tag");
        for (const auto& [key, value] : table) {
            if (key == "tag") continue;
            if (key == "potential")
                v.potential = potential_kind_from_string(value.as_string());
            else if (key == "soft_b")
                v.soft_b = value.as_double();
            else if (key == "quiver_absorber")
                v.quiver_absorber = value.as_bool();
            else if (key == "lambda")
                v.lambda = value.as_double();
            else
                throw config_error("unknown variant key '" + key + "'");
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<VariantSpec> variants_from_file(const std::string& path) {
    return variants_from_document(minitoml::parse_file(path));
}

}  // namespace qhhg
