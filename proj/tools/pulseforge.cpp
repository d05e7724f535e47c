// pulseforge: train, verify and sweep single-qubit DRAG pulses.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pulseforge/workbench.hpp"

namespace wb = pulseforge::workbench;

namespace {

int threads_from_env()
{
    const char* v = std::getenv("PULSEFORGE_THREADS");
    if (v == nullptr || *v == '\0') return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) {
        std::cerr << "warning: ignoring PULSEFORGE_THREADS=" << v << '\n';
        return 1;
    }
    return static_cast<int>(std::min(n, 256L));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-qubit DRAG pulse training workbench"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "Override the training seed");

    auto* train = app.add_subcommand("train", "Train one pulse from an experiment spec");
    std::string spec_path;
    train->add_option("spec", spec_path, "Experiment spec (.json or .toml)")->required();

    auto* suite = app.add_subcommand("suite", "Train the ten benchmark gates");
    std::string suite_device, suite_out;
    suite->add_option("device", suite_device, "Device config")->required();
    suite->add_option("out", suite_out, "Output directory")->required();

    auto* verify = app.add_subcommand("verify", "Check a trained run on fresh inputs");
    std::string run_path, frame_name;
    verify->add_option("run", run_path, "run.json written by train")->required();
    verify->add_option("--frame", frame_name, "Simulate in this frame instead of the recorded one")
        ->check(CLI::IsMember({"lab", "rotating_rwa"}));

    auto* sweep = app.add_subcommand("sweep", "Excited population against drive frequency");
    std::string sweep_device, probe_path, sweep_out = ".";
    double fmin_ghz = 0.0, fmax_ghz = 0.0;
    int n_points = 0;
    sweep->add_option("device", sweep_device, "Device config")->required();
    sweep->add_option("fmin", fmin_ghz, "Lowest drive frequency [GHz]")->required();
    sweep->add_option("fmax", fmax_ghz, "Highest drive frequency [GHz]")->required();
    sweep->add_option("n", n_points, "Number of grid points")->required();
    sweep->add_option("--probe", probe_path, "Probe schedule.json (default: weak Gaussian)");
    sweep->add_option("--out", sweep_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? wb::kExitOk : wb::kExitInvalid;
    }

    wb::CommandOptions opts{seed, threads_from_env()};

    if (*train) return wb::cmd_train(spec_path, opts, std::cout, std::cerr);
    if (*suite) return wb::cmd_suite(suite_device, suite_out, opts, std::cout, std::cerr);
    if (*verify) {
        std::optional<pulseforge::Frame> frame;
        if (frame_name == "lab") frame = pulseforge::Frame::lab;
        if (frame_name == "rotating_rwa") frame = pulseforge::Frame::rotating_rwa;
        return wb::cmd_verify(run_path, frame, std::cout, std::cerr);
    }
    std::optional<wb::fs::path> probe;
    if (!probe_path.empty()) probe = probe_path;
    return wb::cmd_sweep(sweep_device, fmin_ghz * 1e9, fmax_ghz * 1e9, n_points, probe, sweep_out, std::cout,
                         std::cerr);
}
