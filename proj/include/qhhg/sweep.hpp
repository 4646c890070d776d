#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qhhg/checkpoint.hpp"
#include "qhhg/config.hpp"
#include "qhhg/csv.hpp"
#include "qhhg/focal.hpp"
#include "qhhg/photonics.hpp"
#include "qhhg/propagation.hpp"
#include "qhhg/spectrum.hpp"

namespace qhhg {

inline constexpr const char* kVersionString = "0.1.0";

struct TaskOutcome {
    int index = 0;
    double intensity = 0.0;
    SweepRow row{};
    std::string status = "ok";  // "ok" | "failed" | "reused"
    std::string error;
    double ground_energy = 0.0;
    double final_norm = 0.0;
    double crosscheck_dev = 0.0;
    int n_max_used = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
    DipoleRecord record;
};

struct SweepOutput {
    SweepConfig config;
    std::vector<TaskOutcome> tasks;
    std::vector<FocalCurvePoint> focal;
    std::string sweep_csv;
    std::string focal_csv;
    std::string manifest_path;
    double wall_seconds = 0.0;
};

namespace sweepdetail {

inline std::string intensity_label(double intensity) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", intensity);
    return buf;
}

inline std::string checkpoint_path(const SweepConfig& cfg, int index) {
    return cfg.output_dir + "/checkpoints/task_" + std::to_string(index) + ".qck";
}

inline std::string result_path(const SweepConfig& cfg, int index) {
    return cfg.output_dir + "/checkpoints/task_" + std::to_string(index) + ".row.csv";
}

inline void log_line(std::ostream* log, std::mutex& m, const std::string& line) {
    if (log == nullptr) return;
    std::lock_guard<std::mutex> lock(m);
    (*log) << line << "\n" << std::flush;
}

}  // namespace sweepdetail

/// Single-intensity pipeline: relax, propagate, condition on the ground
/// orbital, expand, correlate. Used by the sweep workers and directly by
/// integration tests.
inline TaskOutcome run_one_intensity(const SweepConfig& cfg, const Grid3& grid, int index,
                                     double intensity, bool resume = false) {
    const auto t0 = std::chrono::steady_clock::now();
    TaskOutcome out;
    out.index = index;
    out.intensity = intensity;
    const ModelParams params = cfg.params_for_intensity(intensity);
    out.row.intensity = intensity;
    out.row.e0 = params.e0;
    out.row.params_hash = params.hash();
    try {
        RunSpec spec = cfg.run_spec();
        const std::string ckpt = sweepdetail::checkpoint_path(cfg, index);
        RunResult result;
        GroundState gs = ground_state(params, grid);
        out.ground_energy = gs.energy;
        std::function<void(const Propagator&)> sink;
        if (cfg.checkpoint_every > 0)
            sink = [&grid, &ckpt](const Propagator& p) {
                write_checkpoint(ckpt, make_checkpoint(p, grid));
            };
        if (resume && std::filesystem::exists(ckpt)) {
            Checkpoint c = read_checkpoint(ckpt);
            if (c.params.hash() != params.hash())
                throw config_error("checkpoint '" + ckpt + "' was produced by other parameters");
            Propagator prop = resume_propagator(c);
            result = prop.run(sink);
        } else {
            Propagator prop(params, grid, spec);
            prop.set_state(gs.psi);
            result = prop.run(sink);
        }
        out.final_norm = result.record.norm.back();
        out.warnings = result.warnings;
        if (params.e0 == 0.0)
            out.warnings.push_back("zero drive: trivial row, photon modes stay in vacuum");
        out.record = std::move(result.record);

        PhotonState photons = project_ground_state(result.psi, gs.orbital, params.omega_i(),
                                                   params.omega_j());
        PhotonAnalysis analysis = analyze_photon_state(photons, cfg.photonics);
        out.row.c = analysis.fock;
        out.row.projection_weight = photons.projection_weight;
        out.crosscheck_dev = analysis.crosscheck_dev;
        out.n_max_used = analysis.n_max_used;
        std::error_code ec;
        std::filesystem::remove(ckpt, ec);  // finished tasks do not need their snapshot
    } catch (const std::exception& ex) {
        out.status = "failed";
        out.error = ex.what();
        out.row.c = ratios_from_raw(undefined_value(), undefined_value(), undefined_value(),
                                    undefined_value(), undefined_value());
        out.row.projection_weight = undefined_value();
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace sweepdetail {

inline void write_task_products(const SweepConfig& cfg, const TaskOutcome& task) {
    if (task.status == "failed") return;
    const std::string label = intensity_label(task.intensity);
    if (cfg.write_dipoles)
        write_dipole_csv(cfg.output_dir + "/dipole_" + label + ".csv", task.record);
    if (cfg.write_spectra) {
        const Spectrum spec = hhg_spectrum(task.record, cfg.model.omega_L, cfg.window,
                                           &cfg.model.env);
        write_spectrum_csv(cfg.output_dir + "/spectrum_" + label + ".csv", spec);
    }
    // single-row table so interrupted sweeps can reuse finished work
    const SweepRow row[] = {task.row};
    write_sweep_csv(result_path(cfg, task.index), row);
}

inline nlohmann::json task_json(const TaskOutcome& t) {
    nlohmann::json j;
    j["index"] = t.index;
    j["intensity_Wcm2"] = t.intensity;
    j["status"] = t.status;
    if (!t.error.empty()) j["error"] = t.error;
    j["ground_energy_au"] = t.ground_energy;
    j["final_norm"] = t.final_norm;
    j["projection_weight"] = t.row.projection_weight;
    j["crosscheck_deviation"] = t.crosscheck_dev;
    j["fock_n_max_used"] = t.n_max_used;
    j["wall_seconds"] = t.wall_seconds;
    j["params_hash"] = hash_hex(t.row.params_hash);
    j["warnings"] = t.warnings;
    return j;
}

}  // namespace sweepdetail

/// Run the full sweep: one task per intensity on a small worker pool, then
/// the focal table, per-intensity spectra, and the run manifest.
inline SweepOutput run_sweep(const SweepConfig& cfg, bool resume = false,
                             std::ostream* log = nullptr) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    fs::create_directories(cfg.output_dir + "/checkpoints");

    SweepOutput out;
    out.config = cfg;
    const Grid3 grid = cfg.make_grid3();
    const std::vector<double> intensities = cfg.intensities.values();
    out.tasks.resize(intensities.size());

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= intensities.size()) return;
            const int index = static_cast<int>(task);
            TaskOutcome outcome;
            const std::string done = sweepdetail::result_path(cfg, index);
            bool reused = false;
            if (resume && fs::exists(done)) {
                try {
                    const auto rows = read_sweep_csv(done);
                    if (rows.size() == 1 &&
                        std::abs(rows[0].intensity - intensities[task]) <
                            1e-9 * intensities[task]) {
                        outcome.index = index;
                        outcome.intensity = intensities[task];
                        outcome.row = rows[0];
                        outcome.status = "reused";
                        reused = true;
                    }
                } catch (const std::exception&) {
                    reused = false;
                }
            }
            if (!reused) {
                outcome = run_one_intensity(cfg, grid, index, intensities[task], resume);
                try {
                    sweepdetail::write_task_products(cfg, outcome);
                } catch (const std::exception& ex) {
                    outcome.warnings.push_back(std::string("output write failed: ") + ex.what());
                }
            }
            char buf[160];
            std::snprintf(buf, sizeof buf, "[%2d/%2zu] I=%.4e %s (%.0f s)%s", index + 1,
                          intensities.size(), intensities[task], outcome.status.c_str(),
                          outcome.wall_seconds,
                          outcome.status == "failed" ? (": " + outcome.error).c_str() : "");
            sweepdetail::log_line(log, log_mutex, buf);
            out.tasks[task] = std::move(outcome);
        }
    };
    {
        const int n_workers = std::min<int>(cfg.jobs, static_cast<int>(intensities.size()));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<SweepRow> rows;
    rows.reserve(out.tasks.size());
    for (const TaskOutcome& t : out.tasks) rows.push_back(t.row);
    out.sweep_csv = cfg.output_dir + "/sweep.csv";
    write_sweep_csv(out.sweep_csv, rows);

    std::vector<std::string> focal_warnings;
    const std::vector<double> i0 = cfg.focal_i0_values();
    if (!i0.empty()) {
        try {
            out.focal = r_av_curve(rows, i0, cfg.focal.i_min, cfg.photonics.denom_floor,
                                   &focal_warnings);
            out.focal_csv = cfg.output_dir + "/focal_averaged.csv";
            write_focal_csv(out.focal_csv, out.focal, cfg.hash());
        } catch (const std::exception& ex) {
            focal_warnings.push_back(std::string("focal averaging failed: ") + ex.what());
        }
    }

    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json manifest;
    manifest["tool"] = "qhhg";
    manifest["version"] = kVersionString;
    manifest["config_hash"] = hash_hex(cfg.hash());
    manifest["config_canonical"] = cfg.canonical();
    manifest["output_dir"] = cfg.output_dir;
    manifest["jobs"] = cfg.jobs;
    manifest["wall_seconds"] = out.wall_seconds;
    manifest["focal_warnings"] = focal_warnings;
    manifest["tasks"] = nlohmann::json::array();
    nlohmann::json failed = nlohmann::json::array();
    for (const TaskOutcome& t : out.tasks) {
        manifest["tasks"].push_back(sweepdetail::task_json(t));
        if (t.status == "failed") failed.push_back(t.index);
    }
    manifest["failed_tasks"] = failed;
    out.manifest_path = cfg.output_dir + "/manifest.json";
    std::ofstream mf(out.manifest_path);
    mf << manifest.dump(2) << "\n";

    sweepdetail::log_line(log, log_mutex,
                          "sweep finished: " + std::to_string(out.tasks.size()) + " tasks, " +
                              std::to_string(failed.size()) + " failed, " +
                              std::to_string(out.wall_seconds) + " s");
    return out;
}

/// Base sweep plus one tagged sweep per variant, each in its own directory.
inline std::vector<SweepOutput> variant_matrix(const SweepConfig& base,
                                               std::span<const VariantSpec> variants,
                                               bool resume = false, std::ostream* log = nullptr) {
    std::vector<SweepOutput> out;
    SweepConfig base_cfg = base;
    base_cfg.output_dir = base.output_dir + "/base";
    out.push_back(run_sweep(base_cfg, resume, log));
    for (const VariantSpec& v : variants) {
        SweepConfig cfg = v.apply(base);
        cfg.output_dir = base.output_dir + "/" + v.tag;
        out.push_back(run_sweep(cfg, resume, log));
    }
    return out;
}

}  // namespace qhhg
