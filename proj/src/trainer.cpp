#include "pulseforge/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "pulseforge/error.hpp"

namespace pulseforge {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t expected_angles(const std::string& name)
{
    if (name == "X" || name == "SX" || name == "H" || name == "ID") return 0;
    if (name == "U") return 3;
    if (name == "RX" || name == "RY" || name == "RZ" || name == "3ROT" || name == "U_RX" || name == "U_RY" ||
        name == "U_RZ") {
        return 1;
    }
    throw ValidationError("unknown gate '" + name + "'");
}

// Random Bloch-sphere inputs shared by dataset generation and verification.
std::vector<std::pair<double, double>> draw_angles(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = theta(rng);
        const double p = phi(rng);
        out.emplace_back(t, p);
    }
    return out;
}

struct Adam {
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps = 1e-8;

    PulseParams::Vector m{};
    PulseParams::Vector v{};
    int t = 0;

    PulseParams::Vector direction(const PulseParams::Vector& g)
    {
        ++t;
        PulseParams::Vector out{};
        const double c1 = 1.0 - std::pow(beta1, t);
        const double c2 = 1.0 - std::pow(beta2, t);
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            out[i] = (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
        return out;
    }

    void reset_momentum() { m = {}; }
};

VerifyReport compare(const Unitary2& realized, const Unitary2& ideal, int n_inputs, std::uint64_t seed)
{
    VerifyReport rep;
    double fsum = 0.0;
    for (const auto& [theta, phi] : draw_angles(n_inputs, seed)) {
        const auto in = bloch_state(theta, phi);
        const auto a = apply(ideal, in);
        const auto b = apply(realized, in);
        const auto [i0, i1] = measure_probs(a);
        const auto [t0, t1] = measure_probs(b);
        rep.rows.push_back({theta, phi, i0, i1, t0, t1});
        rep.max_deviation = std::max({rep.max_deviation, std::abs(i0 - t0), std::abs(i1 - t1)});
        const cplx overlap = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
        fsum += std::norm(overlap);
    }
    rep.average_fidelity = n_inputs > 0 ? fsum / n_inputs : 0.0;
    return rep;
}

}  // namespace

const std::vector<std::string>& registered_gates()
{
    static const std::vector<std::string> names{"X", "SX", "H", "RZ", "RY", "RX", "U", "3ROT", "ID"};
    return names;
}

Unitary2 resolve_gate(const GateSpec& spec)
{
    const std::size_t n = expected_angles(spec.name);
    if (spec.angles.size() != n) {
        throw ValidationError("gate '" + spec.name + "' takes " + std::to_string(n) + " angle(s), got " +
                              std::to_string(spec.angles.size()));
    }
    for (double a : spec.angles) {
        if (!std::isfinite(a)) throw ValidationError("gate '" + spec.name + "': non-finite angle");
    }
    const auto& a = spec.angles;
    const std::string& g = spec.name;
    if (g == "X") return gate_x();
    if (g == "SX") return gate_sx();
    if (g == "H") return gate_h();
    if (g == "ID") return gate_id();
    if (g == "RX") return gate_rx(a[0]);
    if (g == "RY") return gate_ry(a[0]);
    if (g == "RZ") return gate_rz(a[0]);
    if (g == "3ROT") return three_rot(a[0]);
    if (g == "U") return gate_u(a[0], a[1], a[2]);
    if (g == "U_RX") return gate_u(a[0], -0.5 * kPi, 0.5 * kPi);
    if (g == "U_RY") return gate_u(a[0], 0.0, 0.0);
    return gate_u(0.0, 0.0, a[0]);  // U_RZ
}

std::vector<TrainingExample> generate_dataset(const Unitary2& target, int n, std::uint64_t seed)
{
    if (n < 1) throw ValidationError("generate_dataset: n must be >= 1");
    std::vector<TrainingExample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (const auto& [theta, phi] : draw_angles(n, seed)) {
        const auto in = bloch_state(theta, phi);
        out.push_back({in, density_of(apply(target, in))});
    }
    return out;
}

void TrainerConfig::validate() const
{
    if (epochs < 1) throw ValidationError("trainer.epochs must be >= 1");
    if (dataset_size < 1) throw ValidationError("trainer.dataset_size must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ValidationError("trainer.learning_rate must be > 0");
    }
    if (!(init_noise >= 0.0)) throw ValidationError("trainer.init_noise must be >= 0");
    for (double s : step_scale) {
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("trainer.step_scale entries must be > 0");
    }
    if (threads < 1) throw ValidationError("trainer.threads must be >= 1");
    if (!(bounds.duration_min > 0.0) || bounds.duration_min > bounds.duration_max ||
        !(bounds.variance_min > 0.0) || bounds.variance_min > bounds.variance_max) {
        throw ValidationError("trainer.bounds are inconsistent");
    }
}

double loss(const PulseParams& params, std::span<const TrainingExample> dataset, const DeviceModel& dev,
            SquashSign sign)
{
    const auto capped = capped_schedule(params, sign);
    double sum = 0.0;
    for (const auto& ex : dataset) {
        const auto out = evolve(ex.input, capped.schedule, dev).final_state;
        sum += infidelity(density_of(out), ex.target);
    }
    const double mean = dataset.empty() ? 0.0 : sum / static_cast<double>(dataset.size());
    return mean + kCapPenalty * capped.excess;
}

PulseParams::Vector gradient(const PulseParams& params, std::span<const TrainingExample> dataset,
                             const DeviceModel& dev, SquashSign sign, const PulseParams::Vector& steps,
                             int threads)
{
    constexpr std::size_t n = PulseParams::size;
    const auto base = params.to_vector();
    std::array<double, 2 * n> probe{};

    const auto eval = [&](std::size_t k) {
        const std::size_t i = k / 2;
        auto x = base;
        x[i] += (k % 2 == 0) ? steps[i] : -steps[i];
        try {
            probe[k] = loss(PulseParams::from_vector(x), dataset, dev, sign);
        } catch (const InvariantError&) {
            // NaN amplitudes surface as invariant or cap failures inside the simulator.
            probe[k] = std::numeric_limits<double>::quiet_NaN();
        } catch (const AmplitudeCapError&) {
            probe[k] = std::numeric_limits<double>::quiet_NaN();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, 2 * n);
    if (workers == 1) {
        for (std::size_t k = 0; k < 2 * n; ++k) eval(k);
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < 2 * n; k += workers) eval(k);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    PulseParams::Vector g{};
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(probe[2 * i]) || !std::isfinite(probe[2 * i + 1])) {
            throw GradientError("gradient: non-finite loss while probing parameter " + std::to_string(i));
        }
        g[i] = (probe[2 * i] - probe[2 * i + 1]) / (2.0 * steps[i]);
    }
    return g;
}

PulseParams initial_params(const TrainerConfig& cfg)
{
    switch (cfg.init) {
    case InitMode::explicit_params:
        return clamp(cfg.init_params, cfg.bounds);
    case InitMode::random: {
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        const auto& r = cfg.random_ranges;
        const auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
        PulseParams p;
        p.duration = uni(r.duration_lo, r.duration_hi);
        p.signed_modulus = uni(r.modulus_lo, r.modulus_hi);
        p.argument = uni(-kPi, kPi);
        p.variance = uni(r.variance_lo, r.variance_hi);
        p.correction_amplitude = uni(r.beta_lo, r.beta_hi);
        p.phase = uni(-kPi, kPi);
        return clamp(p, cfg.bounds);
    }
    case InitMode::nominal:
        break;
    }
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto v = PulseParams{}.to_vector();
    for (auto& x : v) x += cfg.init_noise * noise(rng);
    return clamp(PulseParams::from_vector(v), cfg.bounds);
}

TrainingRun train(const GateSpec& gate, const TrainerConfig& cfg, const DeviceModel& dev)
{
    cfg.validate();
    dev.validate();
    const Unitary2 target = resolve_gate(gate);
    const auto data = generate_dataset(target, cfg.dataset_size, cfg.seed);

    PulseParams p = initial_params(cfg);
    double current = loss(p, data, dev, cfg.squash_sign);
    const double initial = current;

    TrainingRun run{gate, target, {}, p, current, initial, dev, cfg};
    run.trace.reserve(static_cast<std::size_t>(cfg.epochs));

    Adam adam;
    double rate_factor = 1.0;
    int above_limit = 0;
    const auto& scale = cfg.step_scale;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto g = gradient(p, data, dev, cfg.squash_sign, kFdSteps, cfg.threads);

        // Work in scaled coordinates u = p / scale, where dL/du = scale * g.
        PulseParams::Vector gu{};
        for (std::size_t i = 0; i < gu.size(); ++i) gu[i] = scale[i] * g[i];
        const auto dir = cfg.optimizer == Optimizer::adam ? adam.direction(gu) : gu;

        auto x = p.to_vector();
        const double lr = cfg.learning_rate * rate_factor;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= lr * scale[i] * dir[i];
        const PulseParams candidate = clamp(PulseParams::from_vector(x), cfg.bounds);
        const double next = loss(candidate, data, dev, cfg.squash_sign);

        if (cfg.step_rejection && !(next <= current)) {
            rate_factor *= 0.5;
            adam.reset_momentum();
        } else {
            p = candidate;
            current = next;
            rate_factor = std::min(1.0, rate_factor * 1.1);
        }
        run.trace.push_back({epoch, current});

        above_limit = current > 10.0 * initial ? above_limit + 1 : 0;
        if (above_limit >= 10) {
            throw DivergenceError("train(" + gate.name + "): loss above 10x its initial value for 10 epochs");
        }
    }

    run.final_params = p;
    run.final_infidelity = current;
    return run;
}

std::vector<GateSpec> suite_gates(double rotation_angle, double three_rot_angle)
{
    const double a = rotation_angle;
    return {{"X", {}},       {"SX", {}},      {"H", {}},       {"RZ", {a}},   {"RY", {a}},
            {"RX", {a}},     {"U_RX", {a}},   {"U_RY", {a}},   {"U_RZ", {a}}, {"3ROT", {three_rot_angle}}};
}

SuiteResult train_suite(const DeviceModel& dev, const TrainerConfig& cfg, double rotation_angle,
                        double three_rot_angle)
{
    SuiteResult out;
    for (const auto& g : suite_gates(rotation_angle, three_rot_angle)) {
        try {
            out.runs.push_back(train(g, cfg, dev));
        } catch (const Error& e) {
            out.failures.push_back({g, e.what()});
        }
    }
    return out;
}

Unitary2 realized_unitary(const TrainingRun& run, const DeviceModel& dev)
{
    return unitary_of_schedule(capped_schedule(run.final_params, run.config.squash_sign).schedule, dev);
}

VerifyReport verify_s_sx_s(const Unitary2& sx, int n_inputs, std::uint64_t seed)
{
    const Unitary2 s = gate_rz(0.5 * kPi);
    return compare(s * sx * s, gate_h(), n_inputs, seed);
}

VerifyReport verify_s_sx_s(const TrainingRun& run, const DeviceModel& dev, int n_inputs, std::uint64_t seed)
{
    if (run.gate.name != "SX") {
        throw ValidationError("verify_s_sx_s: run targets " + run.gate.name + ", not SX");
    }
    return verify_s_sx_s(realized_unitary(run, dev), n_inputs, seed);
}

VerifyReport process_check(const Unitary2& realized, const Unitary2& target, int n_inputs, std::uint64_t seed)
{
    return compare(realized, target, n_inputs, seed);
}

}  // namespace pulseforge
