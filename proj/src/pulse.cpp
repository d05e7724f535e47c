#include "pulseforge/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pulseforge/error.hpp"

namespace pulseforge {

namespace {

constexpr double kCapScale = 0.999;

struct LiftedGaussian {
    double center;
    double inv_two_var;
    double edge;       // G at t = 0 and t = duration
    double inv_norm;   // 1 / (1 - edge)
    double variance_sq;

    explicit LiftedGaussian(const PulseParams& p)
        : center(0.5 * p.duration),
          inv_two_var(1.0 / (2.0 * p.variance * p.variance)),
          edge(std::exp(-center * center * inv_two_var)),
          inv_norm(-1.0 / std::expm1(-center * center * inv_two_var)),
          variance_sq(p.variance * p.variance)
    {}

    // g(t) + i beta g'(t)
    cplx shape(double t, double beta) const
    {
        const double x = t - center;
        const double G = std::exp(-x * x * inv_two_var);
        const double g = (G - edge) * inv_norm;
        const double dg = -x / variance_sq * G * inv_norm;
        return {g, beta * dg};
    }
};

}  // namespace

double squash(double x, SquashSign sign)
{
    const double v = std::tanh(0.5 * x);
    return sign == SquashSign::standard ? v : -v;
}

double unsquash(double y, SquashSign sign)
{
    const double v = sign == SquashSign::standard ? y : -y;
    return 2.0 * std::atanh(v);
}

PulseParams::Vector PulseParams::to_vector() const
{
    return {duration, signed_modulus, argument, variance, correction_amplitude, phase};
}

PulseParams PulseParams::from_vector(const Vector& v)
{
    return PulseParams{v[0], v[1], v[2], v[3], v[4], v[5]};
}

cplx PulseParams::amplitude(SquashSign sign) const
{
    return effective_modulus(sign) * std::polar(1.0, argument);
}

std::size_t PulseParams::sample_count() const
{
    return static_cast<std::size_t>(std::max(1L, std::lround(duration)));
}

PulseParams clamp(const PulseParams& p, const ParamBounds& b)
{
    PulseParams out = p;
    out.duration = std::clamp(p.duration, b.duration_min, b.duration_max);
    out.variance = std::clamp(p.variance, b.variance_min, b.variance_max);
    return out;
}

void validate(const PulseParams& p, const ParamBounds& b)
{
    for (double v : p.to_vector()) {
        if (!std::isfinite(v)) throw InvariantError("PulseParams: non-finite field");
    }
    if (p.duration < b.duration_min || p.duration > b.duration_max) {
        throw InvariantError("PulseParams: duration " + std::to_string(p.duration) + " outside [" +
                             std::to_string(b.duration_min) + ", " + std::to_string(b.duration_max) + "]");
    }
    if (p.variance < b.variance_min || p.variance > b.variance_max) {
        throw InvariantError("PulseParams: variance " + std::to_string(p.variance) + " outside bounds");
    }
}

double PulseSchedule::peak() const
{
    double m = 0.0;
    for (const auto& d : samples) m = std::max(m, std::abs(d));
    return m;
}

cplx drag_envelope(const PulseParams& p, double t, SquashSign sign)
{
    const LiftedGaussian shape(p);
    const cplx v = p.amplitude(sign) * shape.shape(t, p.correction_amplitude);
    if (std::abs(v) > 1.0) {
        throw AmplitudeCapError("drag_envelope: magnitude " + std::to_string(std::abs(v)) + " exceeds 1");
    }
    return v;
}

namespace {

PulseSchedule raw_samples(const PulseParams& p, SquashSign sign)
{
    const LiftedGaussian shape(p);
    const cplx amp = p.amplitude(sign);
    PulseSchedule s;
    s.pre_phase = p.phase;
    s.source = p;
    const std::size_t n = p.sample_count();
    s.samples.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.samples.push_back(amp * shape.shape(static_cast<double>(j) + 0.5, p.correction_amplitude));
    }
    return s;
}

}  // namespace

PulseSchedule sample_schedule(const PulseParams& p, SquashSign sign)
{
    PulseSchedule s = raw_samples(p, sign);
    const double peak = s.peak();
    if (peak > 1.0) {
        throw AmplitudeCapError("sample_schedule: peak magnitude " + std::to_string(peak) + " exceeds 1");
    }
    return s;
}

CappedSchedule capped_schedule(const PulseParams& p, SquashSign sign)
{
    CappedSchedule out{raw_samples(p, sign), 0.0};
    const double peak = out.schedule.peak();
    if (peak > 1.0) {
        out.excess = peak - 1.0;
        const double k = kCapScale / peak;
        for (auto& d : out.schedule.samples) d *= k;
    }
    return out;
}

double drive_signal(const PulseSchedule& sched, double freq_hz, std::size_t j, double dt_s,
                    double channel_phase)
{
    if (j >= sched.samples.size()) {
        throw std::out_of_range("drive_signal: sample index " + std::to_string(j) + " >= " +
                                std::to_string(sched.samples.size()));
    }
    const double angle = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(j) * dt_s +
                         channel_phase + sched.pre_phase;
    return (std::polar(1.0, angle) * sched.samples[j]).real();
}

}  // namespace pulseforge
