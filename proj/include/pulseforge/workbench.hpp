#pragma once

// Configuration, persistence and the command implementations behind the
// `pulseforge` CLI.
//
// Exit codes: 0 success, 1 usage/validation/I-O error, 2 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulseforge/pulse.hpp"
#include "pulseforge/simulator.hpp"
#include "pulseforge/trainer.hpp"

namespace pulseforge::workbench {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

/// Parses a config file: JSON (canonical) or, for a `.toml` extension, the
/// TOML subset of key = value pairs, one level of [tables] and flat arrays.
json read_config(const fs::path& path);
json parse_toml(const std::string& text);

// Device: {qubit_freq_ghz, drive_strength_ghz, dt_ns, substeps?, frame?, drive_freq_ghz?}
json device_to_json(const DeviceModel& dev);
DeviceModel device_from_json(const json& j);
DeviceModel load_device(const fs::path& path);

json params_to_json(const PulseParams& p);
PulseParams params_from_json(const json& j);

json trainer_to_json(const TrainerConfig& cfg);
TrainerConfig trainer_from_json(const json& j);

struct ExperimentSpec {
    GateSpec target;
    std::optional<fs::path> device_path;  // resolved against the spec's directory
    TrainerConfig trainer;
    fs::path outputs;
    double threshold = 1e-2;
};

/// Throws ValidationError naming the offending field.
ExperimentSpec experiment_from_json(const json& j, const fs::path& base_dir);
ExperimentSpec load_experiment(const fs::path& path);

/// Run record: gate, duration, signed_modulus, effective_signed_modulus,
/// argument, variance, correction_amplitude, phase, infidelity, and
/// metadata {device, config, angles, initial_infidelity, timestamp}.
json run_to_json(const TrainingRun& run, const std::string& timestamp);
/// The trace is not part of the record; pass the one read from trace.csv.
TrainingRun run_from_json(const json& j, std::vector<TracePoint> trace = {});

std::string trace_to_csv(const std::vector<TracePoint>& trace);
std::vector<TracePoint> trace_from_csv(const std::string& text);

/// {n, dt, pre_phase, samples: [[re, im], ...], params: {...}}; dt in seconds.
json schedule_to_json(const PulseSchedule& sched, double dt_s);
PulseSchedule schedule_from_json(const json& j);

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep);
std::vector<SweepPoint> sweep_from_csv(const std::string& text);

std::string verify_to_csv(const VerifyReport& report);

/// Fixed-width text rendering of suite records.
std::string render_table(const std::vector<TrainingRun>& runs);

/// Weak resonant Gaussian used when no probe schedule is given to `sweep`.
PulseSchedule default_probe();

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
/// ISO-8601 UTC time of the call.
std::string utc_timestamp();

struct CommandOptions {
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

int cmd_train(const fs::path& spec_path, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_suite(const fs::path& device_path, const fs::path& out_dir, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);
/// `frame` overrides the recorded device frame for the check.
int cmd_verify(const fs::path& run_path, std::optional<Frame> frame, std::ostream& out, std::ostream& err);
int cmd_sweep(const fs::path& device_path, double f_min_hz, double f_max_hz, int n_points,
              const std::optional<fs::path>& probe_path, const fs::path& out_dir, std::ostream& out,
              std::ostream& err);

}  // namespace pulseforge::workbench
