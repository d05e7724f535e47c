#pragma once

// Supervised pulse training: random Bloch-sphere inputs paired with the target
// gate's outputs, mean infidelity as the loss, finite-difference gradients and
// an Adam (or plain gradient descent) epoch loop.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pulseforge/pulse.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/simulator.hpp"

namespace pulseforge {

/// A named target gate plus its angles.
///
/// Registered names: X, SX, H, ID (no angles), RX, RY, RZ, 3ROT (one angle),
/// U (three angles: dtheta, dchi, dlambda). The suite additionally uses
/// U_RX, U_RY, U_RZ (one angle), which build the axis rotation through gate_u.
struct GateSpec {
    std::string name;
    std::vector<double> angles;

    friend bool operator==(const GateSpec&, const GateSpec&) = default;
};

/// Names accepted in experiment specs.
const std::vector<std::string>& registered_gates();

/// Throws ValidationError for unknown names or a wrong number of angles.
Unitary2 resolve_gate(const GateSpec& spec);

struct TrainingExample {
    PureState input;
    DensityMatrix target;
};

/// theta ~ U[0, pi], phi ~ U[0, 2pi) from a generator seeded with `seed`;
/// target = density_of(target_gate * input). Throws ValidationError for n < 1.
std::vector<TrainingExample> generate_dataset(const Unitary2& target, int n, std::uint64_t seed);

enum class Optimizer { adam, gd };

enum class InitMode {
    /// duration 64, r 0.5, alpha 0, variance 16, beta 0, phase 0, plus seeded N(0, init_noise).
    nominal,
    /// Uniform draw over RandomInitRanges.
    random,
    /// TrainerConfig::init_params used as given.
    explicit_params,
};

struct RandomInitRanges {
    double duration_lo = 32.0, duration_hi = 128.0;
    double modulus_lo = -3.0, modulus_hi = 3.0;
    double variance_lo = 4.0, variance_hi = 64.0;
    double beta_lo = -2.0, beta_hi = 2.0;
};

struct TrainerConfig {
    int epochs = 100;
    int dataset_size = 10;
    std::uint64_t seed = 1;
    double learning_rate = 0.05;
    Optimizer optimizer = Optimizer::adam;
    InitMode init = InitMode::nominal;
    PulseParams init_params{};
    double init_noise = 0.05;
    RandomInitRanges random_ranges{};
    ParamBounds bounds{};
    /// Per-parameter step scale (duration, r, alpha, variance, beta, phase):
    /// the optimizer works on p / step_scale.
    PulseParams::Vector step_scale{8.0, 1.0, 1.0, 8.0, 64.0, 1.0};
    /// Reject updates that raise the loss, halving the step; accepted updates
    /// grow it back by 10% up to the configured rate.
    bool step_rejection = true;
    SquashSign squash_sign = SquashSign::standard;
    /// Worker threads for gradient probes. Results do not depend on it.
    int threads = 1;

    /// Throws ValidationError for epochs < 1, dataset_size < 1, learning_rate <= 0.
    void validate() const;
};

/// Amplitude-cap penalty weight: loss += kCapPenalty * (peak - 1).
inline constexpr double kCapPenalty = 10.0;

/// Central finite-difference steps: duration, r, alpha, variance, beta, phase.
/// The duration step stays well inside one sample-rounding cell.
inline constexpr PulseParams::Vector kFdSteps{0.05, 1e-3, 1e-3, 1e-2, 1e-3, 1e-3};

/// Mean over the dataset of 1 - F(evolved output, target), plus the cap penalty.
double loss(const PulseParams& params, std::span<const TrainingExample> dataset, const DeviceModel& dev,
            SquashSign sign = SquashSign::standard);

/// Central finite differences with the given steps. Throws GradientError if
/// any probe loss is non-finite.
PulseParams::Vector gradient(const PulseParams& params, std::span<const TrainingExample> dataset,
                             const DeviceModel& dev, SquashSign sign = SquashSign::standard,
                             const PulseParams::Vector& steps = kFdSteps, int threads = 1);

struct TracePoint {
    int epoch;
    double infidelity;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct TrainingRun {
    GateSpec gate;
    Unitary2 target;
    /// Loss after each epoch's update; size() == config.epochs.
    std::vector<TracePoint> trace;
    PulseParams final_params;
    /// Equal to trace.back().infidelity.
    double final_infidelity = 0.0;
    double initial_infidelity = 0.0;
    DeviceModel device;
    TrainerConfig config;
};

PulseParams initial_params(const TrainerConfig& cfg);

/// Runs the epoch loop. Throws DivergenceError when the loss exceeds ten
/// times its initial value for ten consecutive epochs.
TrainingRun train(const GateSpec& gate, const TrainerConfig& cfg, const DeviceModel& dev);

/// The ten benchmark targets: X, SX, H, RZ, RY, RX, U_RX, U_RY, U_RZ, 3ROT.
std::vector<GateSpec> suite_gates(double rotation_angle, double three_rot_angle);

struct SuiteFailure {
    GateSpec gate;
    std::string message;
};

struct SuiteResult {
    std::vector<TrainingRun> runs;
    std::vector<SuiteFailure> failures;
};

/// Trains every suite gate; errors are collected per gate and do not stop the suite.
SuiteResult train_suite(const DeviceModel& dev, const TrainerConfig& cfg, double rotation_angle,
                        double three_rot_angle);

/// Unitary actually realized by a run's final parameters on `dev`.
Unitary2 realized_unitary(const TrainingRun& run, const DeviceModel& dev);

struct ProbabilityRow {
    double theta;
    double phi;
    double ideal_p0, ideal_p1;
    double trained_p0, trained_p1;
};

struct VerifyReport {
    std::vector<ProbabilityRow> rows;
    /// max over rows of |ideal_p - trained_p|.
    double max_deviation = 0.0;
    /// mean |<ideal|trained>|^2 over the inputs.
    double average_fidelity = 0.0;
};

/// Compares S * sx * S (S = Rz(pi/2), exact) with H on random inputs.
VerifyReport verify_s_sx_s(const Unitary2& sx, int n_inputs = 10, std::uint64_t seed = 7);
/// As above using the pulse of an SX run. Throws ValidationError for other gates.
VerifyReport verify_s_sx_s(const TrainingRun& run, const DeviceModel& dev, int n_inputs = 10,
                           std::uint64_t seed = 7);

/// Compares `realized` with `target` on fresh random inputs.
VerifyReport process_check(const Unitary2& realized, const Unitary2& target, int n_inputs = 100,
                           std::uint64_t seed = 11);

}  // namespace pulseforge
