// Command line front end: intensity sweeps, focal averaging of existing sweep
// tables, harmonic spectra from dipole records, and model-variant matrices.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qhhg/csv.hpp"
#include "qhhg/sweep.hpp"

namespace {

qhhg::SweepConfig load_config(const std::string& path, const std::string& output_dir, int jobs) {
    qhhg::SweepConfig cfg = qhhg::sweep_config_from_file(path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (jobs > 0) cfg.jobs = jobs;
    cfg.validate();
    return cfg;
}

int summarize(const std::vector<qhhg::SweepOutput>& outputs) {
    int failed = 0;
    for (const auto& out : outputs) {
        for (const auto& task : out.tasks)
            if (task.status == "failed") {
                ++failed;
                std::cerr << "failed: I=" << task.intensity << " (" << task.error << ")\n";
            }
        std::cout << out.sweep_csv << "\n";
        if (!out.focal_csv.empty()) std::cout << out.focal_csv << "\n";
    }
    return failed == 0 ? 0 : 1;
}

std::uint64_t file_content_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return qhhg::fnv1a64(buf.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strong-field two-mode photon entanglement simulator"};
    app.require_subcommand(1);

    std::string config_path, variants_path, output_dir;
    int jobs = 0;
    bool resume = false;

    auto* run_cmd = app.add_subcommand("run", "run the intensity sweep from a config file");
    run_cmd->add_option("config", config_path, "TOML configuration")->required();
    run_cmd->add_option("--output-dir", output_dir, "override the configured output directory");
    run_cmd->add_option("--jobs", jobs, "override the configured worker count");
    run_cmd->add_flag("--resume", resume, "reuse finished rows and mid-run checkpoints");

    auto* variants_cmd =
        app.add_subcommand("variants", "run the base sweep plus tagged model variants");
    variants_cmd->add_option("config", config_path, "TOML configuration")->required();
    variants_cmd->add_option("variants", variants_path, "TOML file with [[variant]] blocks")
        ->required();
    variants_cmd->add_option("--output-dir", output_dir, "override the output directory");
    variants_cmd->add_option("--jobs", jobs, "override the configured worker count");
    variants_cmd->add_flag("--resume", resume, "reuse finished rows and mid-run checkpoints");

    std::string sweep_path, focal_out;
    std::vector<double> i0_list;
    double i_min = 0.32e14;
    auto* focal_cmd = app.add_subcommand("focal", "focal-average an existing sweep table");
    focal_cmd->add_option("sweep", sweep_path, "sweep.csv produced by 'run'")->required();
    focal_cmd->add_option("--i0-list", i0_list, "peak intensities to evaluate (W/cm^2)")
        ->delimiter(',');
    focal_cmd->add_option("--i-min", i_min, "lower integration limit (W/cm^2)");
    focal_cmd->add_option("--out", focal_out, "output CSV path");

    std::string dipole_path, spectrum_out, window_name = "envelope";
    double omega_l = 0.057;
    std::vector<double> cycles{2.5, 5.5, 8.0};
    auto* spectrum_cmd = app.add_subcommand("spectrum", "harmonic spectrum of a dipole record");
    spectrum_cmd->add_option("dipole", dipole_path, "two-column dipole CSV")->required();
    spectrum_cmd->add_option("--omega-L", omega_l, "laser frequency in a.u.");
    spectrum_cmd->add_option("--window", window_name, "apodization: envelope or none");
    spectrum_cmd->add_option("--cycles", cycles, "envelope times in laser cycles (ramp,down,stop)")
        ->delimiter(',')
        ->expected(3);
    spectrum_cmd->add_option("--out", spectrum_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const qhhg::SweepConfig cfg = load_config(config_path, output_dir, jobs);
            return summarize({qhhg::run_sweep(cfg, resume, &std::cerr)});
        }
        if (variants_cmd->parsed()) {
            const qhhg::SweepConfig cfg = load_config(config_path, output_dir, jobs);
            const auto variants = qhhg::variants_from_file(variants_path);
            return summarize(qhhg::variant_matrix(cfg, variants, resume, &std::cerr));
        }
        if (focal_cmd->parsed()) {
            const auto rows = qhhg::read_sweep_csv(sweep_path);
            std::vector<double> i0 = i0_list;
            if (i0.empty())
                for (const auto& r : rows)
                    if (r.intensity > i_min * (1.0 + 1e-12)) i0.push_back(r.intensity);
            std::vector<std::string> warnings;
            const auto curve = qhhg::r_av_curve(rows, i0, i_min, 1e-30, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            if (focal_out.empty())
                focal_out = (std::filesystem::path(sweep_path).parent_path() /
                             "focal_averaged.csv")
                                .string();
            qhhg::write_focal_csv(focal_out, curve, file_content_hash(sweep_path));
            std::cout << focal_out << "\n";
            return 0;
        }
        if (spectrum_cmd->parsed()) {
            const qhhg::DipoleRecord record = qhhg::read_dipole_csv(dipole_path);
            const qhhg::SpectrumWindow window = qhhg::spectrum_window_from_string(window_name);
            const qhhg::EnvelopeTimes env =
                qhhg::EnvelopeTimes::from_cycles(omega_l, cycles[0], cycles[1], cycles[2]);
            const qhhg::Spectrum spec = qhhg::hhg_spectrum(record, omega_l, window, &env);
            if (spectrum_out.empty()) {
                std::filesystem::path p(dipole_path);
                spectrum_out = (p.parent_path() / (p.stem().string() + "_spectrum.csv")).string();
            }
            qhhg::write_spectrum_csv(spectrum_out, spec);
            std::cout << spectrum_out << "\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
