#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qhhg/checkpoint.hpp"
#include "qhhg/config.hpp"
#include "qhhg/csv.hpp"
#include "qhhg/toml.hpp"

using namespace qhhg;

namespace {

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / "qhhg_io_test";
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("toml subset parsing") {
    const std::string text = R"(
# comment
title = "two modes"   # trailing comment
[model]
omega_L = 0.057
harmonics = [3, 5]
lambda = 1e-2
quiver_absorber = true
names = ["a", "b"]

[grid]
electron_points = 256

[[variant]]
tag = "one"
lambda = 0.005

[[variant]]
tag = "two"
potential = "gaussian_well"
)";
    const auto doc = minitoml::parse(text, "test");
    REQUIRE(minitoml::get_string(doc.root, "title", "") == "two modes");
    REQUIRE(minitoml::get_double(doc.root, "model.omega_L", 0.0) == Catch::Approx(0.057));
    REQUIRE(minitoml::get_double(doc.root, "model.lambda", 0.0) == Catch::Approx(0.01));
    REQUIRE(minitoml::get_bool(doc.root, "model.quiver_absorber", false));
    REQUIRE(minitoml::get_int(doc.root, "grid.electron_points", 0) == 256);
    const auto harmonics = minitoml::get_double_array(doc.root, "model.harmonics");
    REQUIRE(harmonics == std::vector<double>{3.0, 5.0});
    REQUIRE(doc.table_arrays.size() == 2);
    REQUIRE(minitoml::get_string(doc.table_arrays[0].second, "tag", "") == "one");
    REQUIRE(minitoml::get_double(doc.table_arrays[1].second, "lambda", 0.005) == 0.005);

    REQUIRE_THROWS_AS(minitoml::parse("a = 1\na = 2\n"), config_error);
    REQUIRE_THROWS_AS(minitoml::parse("nonsense line\n"), config_error);
    REQUIRE_THROWS_AS(minitoml::parse("x = \"unterminated\n"), config_error);
}

TEST_CASE("sweep config from toml") {
    const std::string text = R"(
[model]
omega_L = 0.057
harmonics = [3, 5]
lambda = 0.01
potential = "soft_coulomb"
soft_b = 0.816

[grid]
electron_points = 128
electron_spacing = 0.5
photon_points = 32
photon_extent_sigmas = 6.0

[time]
dt = 0.1
sample_stride = 2
tail_cycles = 0.5

[cap]
width = 10.0
strength = 0.4

[photonics]
n_max = 12
auto_n_max = false

[intensities]
min = 0.32e14
max = 2.0e14
count = 6
spacing = "log"

[focal]
i_min = 0.32e14

[run]
output_dir = "scratch"
jobs = 2
)";
    const SweepConfig cfg = sweep_config_from_document(minitoml::parse(text));
    REQUIRE(cfg.model.harmonic_p == 3);
    REQUIRE(cfg.model.harmonic_q == 5);
    REQUIRE(cfg.grid.photon_points == 32);
    REQUIRE(cfg.dt == Catch::Approx(0.1));
    REQUIRE(cfg.photonics.n_max == 12);
    REQUIRE_FALSE(cfg.photonics.auto_double);
    REQUIRE(cfg.intensities.values().size() == 6);
    REQUIRE(cfg.intensities.values().front() == Catch::Approx(0.32e14));
    REQUIRE(cfg.intensities.values().back() == Catch::Approx(2.0e14));
    REQUIRE(cfg.jobs == 2);

    // the photon axes are sized in vacuum widths of each mode
    const Grid3 g = cfg.make_grid3();
    const double s1 = cfg.model.sigma_i();
    REQUIRE(g.axes[1].spacing == Catch::Approx(2.0 * 6.0 * s1 / 32));

    // unknown keys are rejected
    REQUIRE_THROWS_AS(sweep_config_from_document(minitoml::parse("[model]\nomega = 1\n")),
                      config_error);
    // so are malformed harmonic pairs
    REQUIRE_THROWS_AS(
        sweep_config_from_document(minitoml::parse("[model]\nharmonics = [3]\n")),
        config_error);

    // hashes differ when physics changes
    SweepConfig other = cfg;
    other.model.lambda = 0.02;
    REQUIRE(cfg.hash() != other.hash());
}

TEST_CASE("variants file parsing") {
    const std::string text = R"(
[[variant]]
tag = "quiver"
quiver_absorber = true

[[variant]]
tag = "weak"
lambda = 0.005

[[variant]]
tag = "helium"
potential = "screened_soft_coulomb"
)";
    const auto variants = variants_from_document(minitoml::parse(text));
    REQUIRE(variants.size() == 3);
    REQUIRE(variants[0].tag == "quiver");
    REQUIRE(variants[0].quiver_absorber.value());
    REQUIRE(variants[1].lambda.value() == Catch::Approx(0.005));
    REQUIRE(variants[2].potential.value() == PotentialKind::ScreenedSoftCoulomb);

    SweepConfig base;
    const SweepConfig weak = variants[1].apply(base);
    REQUIRE(weak.model.lambda == Catch::Approx(0.005));
    REQUIRE(base.model.lambda == Catch::Approx(0.01));

    REQUIRE_THROWS_AS(variants_from_document(minitoml::parse("[[variant]]\nlambda = 1.0\n")),
                      config_error);
    REQUIRE_THROWS_AS(
        variants_from_document(minitoml::parse("[[variant]]\ntag = \"x\"\ndt = 0.1\n")),
        config_error);
}

TEST_CASE("sweep csv round trip") {
    const auto dir = temp_dir();
    std::vector<SweepRow> rows;
    for (int m = 0; m < 3; ++m) {
        SweepRow r;
        r.intensity = 0.32e14 * (m + 1);
        r.e0 = field_from_intensity(r.intensity);
        r.c = ratios_from_raw(1.23e-4 * (m + 1), 4.56e-5, 7.8e-9, 9.1e-9, 3.3e-9);
        r.projection_weight = 0.999/(m+1);
        r.params_hash = 0xdeadbeefcafe1234ull + static_cast<std::uint64_t>(m);
        rows.push_back(r);
    }
    // one row with an undefined ratio
    rows[2].c = ratios_from_raw(0.0, 0.0, 0.0, 0.0, 0.0);
    const std::string path = (dir / "sweep.csv").string();
    write_sweep_csv(path, rows);
    const auto back = read_sweep_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t m = 0; m < rows.size(); ++m) {
        REQUIRE(back[m].intensity == rows[m].intensity);
        REQUIRE(back[m].e0 == rows[m].e0);
        REQUIRE(back[m].c.n_i == rows[m].c.n_i);
        REQUIRE(back[m].c.cross4 == rows[m].c.cross4);
        REQUIRE(back[m].params_hash == rows[m].params_hash);
    }
    REQUIRE_FALSE(is_defined(back[2].c.g2_ii));

    REQUIRE_THROWS_AS(read_sweep_csv((dir / "missing.csv").string()), io_error);
}

TEST_CASE("dipole and focal csv round trips") {
    const auto dir = temp_dir();
    DipoleRecord rec;
    for (int m = 0; m < 64; ++m) {
        rec.times.push_back(0.25 * m);
        rec.dipole.push_back(std::sin(0.1 * m) * 1e-3);
        rec.norm.push_back(1.0);
    }
    const std::string dpath = (dir / "dipole.csv").string();
    write_dipole_csv(dpath, rec);
    const DipoleRecord back = read_dipole_csv(dpath);
    REQUIRE(back.times == rec.times);
    REQUIRE(back.dipole == rec.dipole);

    std::vector<FocalCurvePoint> curve(2);
    curve[0].i0 = 1e14;
    curve[0].c = ratios_from_raw(1e-4, 2e-4, 3e-9, 4e-9, 2e-9);
    curve[1].i0 = 2e14;
    curve[1].c = ratios_from_raw(2e-4, 3e-4, 4e-9, 5e-9, 3e-9);
    const std::string fpath = (dir / "focal_averaged.csv").string();
    write_focal_csv(fpath, curve, 0x1234u);
    const auto fback = read_focal_csv(fpath);
    REQUIRE(fback.size() == 2);
    REQUIRE(fback[1].c.r == curve[1].c.r);
}

TEST_CASE("checkpoint round trip and checksum") {
    const auto dir = temp_dir();
    Checkpoint c;
    c.params.e0 = 0.0421;
    c.params.lambda = 0.015;
    c.grid = make_grid(Axis::centered(16, 0.5), Axis::centered(8, 0.7), Axis::centered(8, 0.6));
    c.spec.dt = 0.08;
    c.spec.checkpoint_every = 50;
    c.step_index = 421;
    c.record.times = {0.0, 1.0, 2.0};
    c.record.dipole = {0.0, 1e-3, -2e-3};
    c.record.norm = {1.0, 0.999, 0.997};
    c.amplitudes.assign(c.grid.size(), cdouble{0.1, -0.2});
    c.amplitudes[17] = cdouble{0.5, 0.25};

    const std::string path = (dir / "state.qck").string();
    write_checkpoint(path, c);
    const Checkpoint back = read_checkpoint(path);
    REQUIRE(back.params == c.params);
    REQUIRE(back.grid == c.grid);
    REQUIRE(back.spec.dt == c.spec.dt);
    REQUIRE(back.step_index == c.step_index);
    REQUIRE(back.record.dipole == c.record.dipole);
    REQUIRE(back.amplitudes == c.amplitudes);

    SECTION("bit flip is caught") {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(200);
        char byte = 0;
        f.read(&byte, 1);
        f.seekp(200);
        byte = static_cast<char>(byte ^ 0x40);
        f.write(&byte, 1);
        f.close();
        REQUIRE_THROWS_AS(read_checkpoint(path), io_error);
    }
    SECTION("truncation is caught") {
        std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
        REQUIRE_THROWS_AS(read_checkpoint(path), io_error);
    }
}

TEST_CASE("checkpointed propagation resumes bit-identically") {
    ModelParams params;
    params.e0 = field_from_intensity(6e13);
    params.env = EnvelopeTimes::from_cycles(params.omega_L, 0.5, 1.0, 1.5);
    const Grid3 grid = make_grid(Axis::centered(96, 0.6),
                                 Axis::centered(16, 12.0 * params.sigma_i() / 16),
                                 Axis::centered(16, 12.0 * params.sigma_j() / 16));
    RunSpec spec;
    spec.dt = 0.12;
    spec.tail_cycles = 0.0;
    spec.cap.width = 10.0;

    GroundState gs = ground_state(params, grid);
    Propagator full(params, grid, spec);
    full.set_state(gs.psi);
    RunResult whole = full.run();

    // capture a mid-run snapshot from an identical propagation
    const long stop = whole.steps / 2;
    const auto dir = temp_dir();
    const std::string path = (dir / "resume.qck").string();
    {
        RunSpec with_snapshots = spec;
        with_snapshots.checkpoint_every = static_cast<int>(stop);
        Propagator live(params, grid, with_snapshots);
        live.set_state(gs.psi);
        bool saved = false;
        live.run([&](const Propagator& p) {
            if (!saved && p.step_index() == stop) {
                write_checkpoint(path, make_checkpoint(p, grid));
                saved = true;
            }
        });
        REQUIRE(saved);
    }
    Checkpoint c = read_checkpoint(path);
    REQUIRE(c.step_index == stop);
    Propagator resumed = resume_propagator(c);
    RunResult rest = resumed.run();
    REQUIRE(rest.record.times.size() == whole.record.times.size());
    for (std::size_t m = 0; m < whole.record.dipole.size(); ++m)
        REQUIRE(rest.record.dipole[m] == whole.record.dipole[m]);
    for (std::size_t m = 0; m < whole.psi.amp.size(); ++m)
        REQUIRE(rest.psi.amp[m] == whole.psi.amp[m]);
}
