#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qhhg/checkpoint.hpp"
#include "qhhg/csv.hpp"
#include "qhhg/sweep.hpp"

using namespace qhhg;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "qhhg_sweep_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

/// Short, small config that still exercises the whole pipeline. The coupling
/// sits at the top of the studied range so even a 1.5-cycle pulse produces
/// fourth-order moments well above the numeric floor, and the photon axes
/// are wide enough that clipped vacuum tails cannot pollute them.
SweepConfig tiny_config(const std::string& out_dir) {
    SweepConfig cfg;
    cfg.model.lambda = 0.02;
    cfg.model.env = EnvelopeTimes::from_cycles(cfg.model.omega_L, 0.5, 1.0, 1.5);
    cfg.grid.electron_points = 96;
    cfg.grid.electron_spacing = 0.6;
    cfg.grid.photon_points = 48;
    cfg.grid.photon_extent_sigmas = 12.0;
    cfg.dt = 0.12;
    cfg.sample_stride = 2;
    cfg.tail_cycles = 0.0;
    cfg.cap.width = 12.0;
    cfg.photonics.n_max = 8;
    cfg.photonics.auto_double = true;
    cfg.intensities = {0.5e14, 1.4e14, 5, true};
    cfg.focal.i_min = 0.5e14;
    cfg.output_dir = out_dir;
    cfg.jobs = 2;
    return cfg;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("tiny sweep produces the full output set") {
    const fs::path dir = fresh_dir("basic");
    SweepConfig cfg = tiny_config(dir.string());
    SweepOutput out = run_sweep(cfg);

    REQUIRE(out.tasks.size() == 5);
    for (const TaskOutcome& t : out.tasks) {
        INFO(t.error);
        REQUIRE(t.status == "ok");
        REQUIRE(t.ground_energy == Catch::Approx(-0.7925).margin(2e-3));
        REQUIRE(t.row.projection_weight > 0.5);
        REQUIRE(t.row.projection_weight <= 1.0 + 1e-12);
        REQUIRE(t.crosscheck_dev < 1e-4);
        REQUIRE(t.row.c.n_i >= 0.0);
        REQUIRE(t.row.c.self4_i >= -1e-18);
    }
    // photon occupation should grow with intensity overall, and the moments
    // must sit far above the zero floor so the dual-path check was sharp
    REQUIRE(out.tasks.back().row.c.n_i > out.tasks.front().row.c.n_i);
    REQUIRE(out.tasks.back().row.c.self4_i > 1e-12);

    REQUIRE(fs::exists(out.sweep_csv));
    REQUIRE(fs::exists(out.focal_csv));
    REQUIRE(fs::exists(out.manifest_path));
    for (const TaskOutcome& t : out.tasks) {
        const std::string label = sweepdetail::intensity_label(t.intensity);
        REQUIRE(fs::exists(dir / ("spectrum_" + label + ".csv")));
        REQUIRE(fs::exists(dir / ("dipole_" + label + ".csv")));
    }

    const auto rows = read_sweep_csv(out.sweep_csv);
    REQUIRE(rows.size() == 5);
    REQUIRE(rows[0].params_hash == out.tasks[0].row.params_hash);

    // focal curve exists for nodes above the floor and ends at the sweep top
    REQUIRE_FALSE(out.focal.empty());
    REQUIRE(out.focal.back().i0 == Catch::Approx(1.4e14));

    // manifest is valid json with the config hash
    std::ifstream mf(out.manifest_path);
    nlohmann::json manifest;
    mf >> manifest;
    REQUIRE(manifest["config_hash"] == hash_hex(cfg.hash()));
    REQUIRE(manifest["tasks"].size() == 5);
    REQUIRE(manifest["failed_tasks"].empty());
}

TEST_CASE("identical configs give byte-identical tables") {
    const fs::path dir_a = fresh_dir("det_a");
    const fs::path dir_b = fresh_dir("det_b");
    SweepConfig cfg_a = tiny_config(dir_a.string());
    cfg_a.intensities.count = 3;
    SweepConfig cfg_b = cfg_a;
    cfg_b.output_dir = dir_b.string();
    run_sweep(cfg_a);
    run_sweep(cfg_b);
    REQUIRE(file_bytes(dir_a / "sweep.csv") == file_bytes(dir_b / "sweep.csv"));
    REQUIRE(file_bytes(dir_a / "focal_averaged.csv") == file_bytes(dir_b / "focal_averaged.csv"));
}

TEST_CASE("zero drive leaves the modes in vacuum") {
    const fs::path dir = fresh_dir("zero");
    SweepConfig cfg = tiny_config(dir.string());
    cfg.intensities = {0.0, 0.0, 1, false};
    cfg.focal.i0_list.clear();
    SweepOutput out = run_sweep(cfg);
    REQUIRE(out.tasks.size() == 1);
    REQUIRE(out.tasks[0].status == "ok");
    REQUIRE(out.tasks[0].row.e0 == 0.0);
    REQUIRE(std::abs(out.tasks[0].row.c.n_i) < 1e-8);
    REQUIRE(std::abs(out.tasks[0].row.c.n_j) < 1e-8);
    // the trivial node is flagged
    bool flagged = false;
    for (const auto& w : out.tasks[0].warnings) flagged |= w.find("zero drive") != std::string::npos;
    REQUIRE(flagged);
}

TEST_CASE("failures are recorded and the sweep continues") {
    const fs::path dir = fresh_dir("fail");
    SweepConfig cfg = tiny_config(dir.string());
    cfg.intensities.count = 2;
    cfg.cap.width = 1000.0;  // invalid for the axis: every task fails
    SweepOutput out = run_sweep(cfg);
    REQUIRE(out.tasks.size() == 2);
    for (const TaskOutcome& t : out.tasks) {
        REQUIRE(t.status == "failed");
        REQUIRE_FALSE(t.error.empty());
        REQUIRE_FALSE(is_defined(t.row.c.n_i));
    }
    REQUIRE(fs::exists(out.sweep_csv));
    std::ifstream mf(out.manifest_path);
    nlohmann::json manifest;
    mf >> manifest;
    REQUIRE(manifest["failed_tasks"].size() == 2);
}

TEST_CASE("observables are stable over the field-free tail") {
    const fs::path dir = fresh_dir("tail");
    SweepConfig cfg = tiny_config(dir.string());
    const Grid3 grid = cfg.make_grid3();
    SweepConfig with_tail = cfg;
    with_tail.tail_cycles = 1.0;
    const TaskOutcome at_end = run_one_intensity(cfg, grid, 0, 1.0e14);
    const TaskOutcome after_tail = run_one_intensity(with_tail, grid, 0, 1.0e14);
    REQUIRE(at_end.status == "ok");
    REQUIRE(after_tail.status == "ok");
    REQUIRE(std::abs(at_end.row.c.n_i - after_tail.row.c.n_i) < 1e-8);
    REQUIRE(std::abs(at_end.row.c.n_j - after_tail.row.c.n_j) < 1e-8);
    REQUIRE(std::abs(at_end.row.c.self4_i - after_tail.row.c.self4_i) < 1e-8);
    REQUIRE(std::abs(at_end.row.c.cross4 - after_tail.row.c.cross4) < 1e-8);
}

TEST_CASE("sweep resume reuses finished rows and mid-run checkpoints") {
    const fs::path dir_ref = fresh_dir("resume_ref");
    SweepConfig ref_cfg = tiny_config(dir_ref.string());
    ref_cfg.intensities.count = 3;
    ref_cfg.jobs = 1;
    SweepOutput ref = run_sweep(ref_cfg);

    const fs::path dir = fresh_dir("resume");
    SweepConfig cfg = ref_cfg;
    cfg.output_dir = dir.string();

    // pretend a previous invocation finished task 0 and left a mid-run
    // snapshot for task 1
    fs::create_directories(dir / "checkpoints");
    {
        const SweepRow done[] = {ref.tasks[0].row};
        write_sweep_csv((dir / "checkpoints/task_0.row.csv").string(), done);

        const ModelParams params = cfg.params_for_intensity(cfg.intensities.values()[1]);
        const Grid3 grid = cfg.make_grid3();
        GroundState gs = ground_state(params, grid);
        RunSpec spec = cfg.run_spec();
        spec.checkpoint_every = 120;
        Propagator prop(params, grid, spec);
        prop.set_state(gs.psi);
        bool saved = false;
        prop.run([&](const Propagator& p) {
            if (!saved) {
                write_checkpoint((dir / "checkpoints/task_1.qck").string(),
                                 make_checkpoint(p, grid));
                saved = true;
            }
        });
        REQUIRE(saved);
    }

    SweepOutput resumed = run_sweep(cfg, /*resume=*/true);
    REQUIRE(resumed.tasks[0].status == "reused");
    REQUIRE(resumed.tasks[1].status == "ok");
    for (std::size_t m = 0; m < ref.tasks.size(); ++m) {
        REQUIRE(resumed.tasks[m].row.c.n_i ==
                Catch::Approx(ref.tasks[m].row.c.n_i).margin(1e-12));
        REQUIRE(resumed.tasks[m].row.c.cross4 ==
                Catch::Approx(ref.tasks[m].row.c.cross4).margin(1e-12));
    }
    REQUIRE(file_bytes(dir / "sweep.csv") == file_bytes(dir_ref / "sweep.csv"));
}

TEST_CASE("command line round trip") {
    const fs::path dir = fresh_dir("cli");
    const fs::path cfg_path = dir / "run.toml";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[model]\nlambda = 0.02\nenvelope_cycles = [0.5, 1.0, 1.5]\n"
            << "[grid]\nelectron_points = 96\nelectron_spacing = 0.6\nphoton_points = 48\n"
            << "photon_extent_sigmas = 12.0\n"
            << "[time]\ndt = 0.12\nsample_stride = 2\ntail_cycles = 0.0\n"
            << "[cap]\nwidth = 12.0\n"
            << "[photonics]\nn_max = 8\n"
            << "[intensities]\nmin = 0.5e14\nmax = 1.4e14\ncount = 4\nspacing = \"log\"\n"
            << "[focal]\ni_min = 0.5e14\n"
            << "[run]\noutput_dir = \"" << (dir / "out").string() << "\"\njobs = 2\n";
    }
    auto cli = [&](const std::string& args) {
        const std::string cmd = std::string(QHHG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(cli("run " + cfg_path.string()) == 0);
    REQUIRE(fs::exists(dir / "out/sweep.csv"));
    REQUIRE(fs::exists(dir / "out/focal_averaged.csv"));
    REQUIRE(fs::exists(dir / "out/manifest.json"));

    // focal on the produced sweep with an explicit I0 list
    REQUIRE(cli("focal " + (dir / "out/sweep.csv").string() +
                " --i-min 0.5e14 --i0-list 1.0e14,1.4e14 --out " +
                (dir / "refocal.csv").string()) == 0);
    const auto refocal = read_focal_csv((dir / "refocal.csv").string());
    REQUIRE(refocal.size() == 2);

    // spectrum from one of the dipole records
    fs::path dipole;
    for (const auto& e : fs::directory_iterator(dir / "out"))
        if (e.path().filename().string().rfind("dipole_", 0) == 0) dipole = e.path();
    REQUIRE_FALSE(dipole.empty());
    REQUIRE(cli("spectrum " + dipole.string() + " --cycles 0.5,1.0,1.5 --out " +
                (dir / "spec.csv").string()) == 0);
    REQUIRE(fs::exists(dir / "spec.csv"));

    // resume completes instantly by reusing every finished row
    REQUIRE(cli("run " + cfg_path.string() + " --resume") == 0);

    // variants: one tagged override on top of the base sweep
    const fs::path var_path = dir / "variants.toml";
    {
        std::ofstream vf(var_path);
        vf << "[[variant]]\ntag = \"weak\"\nlambda = 0.005\n";
    }
    REQUIRE(cli("variants " + cfg_path.string() + " " + var_path.string() + " --output-dir " +
                (dir / "matrix").string()) == 0);
    REQUIRE(fs::exists(dir / "matrix/base/sweep.csv"));
    REQUIRE(fs::exists(dir / "matrix/weak/sweep.csv"));

    const auto base_rows = read_sweep_csv((dir / "matrix/base/sweep.csv").string());
    const auto weak_rows = read_sweep_csv((dir / "matrix/weak/sweep.csv").string());
    REQUIRE(base_rows.size() == weak_rows.size());
    // weaker coupling emits fewer photons
    REQUIRE(weak_rows.back().c.n_i < base_rows.back().c.n_i);
}
