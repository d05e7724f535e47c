#include "pulseforge/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "pulseforge/error.hpp"

namespace pulseforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec2 = std::array<cplx, 2>;

// -i H v
Vec2 deriv(const Mat2& h, const Vec2& v)
{
    const cplx mi{0.0, -1.0};
    return {mi * (h(0, 0) * v[0] + h(0, 1) * v[1]), mi * (h(1, 0) * v[0] + h(1, 1) * v[1])};
}

Vec2 axpy(const Vec2& v, double a, const Vec2& k)
{
    return {v[0] + a * k[0], v[1] + a * k[1]};
}

template <class HamiltonianAt>
Vec2 rk4_step(const Vec2& v, double t, double h, const HamiltonianAt& ham)
{
    const Mat2 h0 = ham(t);
    const Mat2 hm = ham(t + 0.5 * h);
    const Mat2 h1 = ham(t + h);
    const Vec2 k1 = deriv(h0, v);
    const Vec2 k2 = deriv(hm, axpy(v, 0.5 * h, k1));
    const Vec2 k3 = deriv(hm, axpy(v, 0.5 * h, k2));
    const Vec2 k4 = deriv(h1, axpy(v, h, k3));
    const double w = h / 6.0;
    return {v[0] + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            v[1] + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

double vec_norm(const Vec2& v)
{
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
}

void check_schedule(const PulseSchedule& sched)
{
    for (std::size_t j = 0; j < sched.samples.size(); ++j) {
        const double mag = std::abs(sched.samples[j]);
        if (!(mag <= 1.0)) {
            throw AmplitudeCapError("evolve: sample " + std::to_string(j) + " has magnitude " +
                                    std::to_string(mag));
        }
    }
}

}  // namespace

void DeviceModel::validate() const
{
    if (!(qubit_freq_hz > 0.0) || !std::isfinite(qubit_freq_hz)) {
        throw ValidationError("DeviceModel: qubit_freq must be positive");
    }
    if (!(drive_strength_hz > 0.0) || !std::isfinite(drive_strength_hz)) {
        throw ValidationError("DeviceModel: drive_strength must be positive");
    }
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) throw ValidationError("DeviceModel: dt must be positive");
    if (drive_freq_hz && (!(*drive_freq_hz > 0.0) || !std::isfinite(*drive_freq_hz))) {
        throw ValidationError("DeviceModel: drive_freq must be positive");
    }
    if (substeps && *substeps < 1) throw ValidationError("DeviceModel: substeps must be >= 1");
}

EvolutionResult evolve(const PureState& initial, const PulseSchedule& sched, const DeviceModel& dev)
{
    dev.validate();
    check_schedule(sched);

    const int sub = dev.effective_substeps();
    const double h = dev.dt_s / sub;
    const double nu = dev.qubit_freq_hz;
    const double f = dev.carrier_hz();
    const double omega = dev.drive_strength_hz;
    const cplx frame_phase = std::polar(1.0, sched.pre_phase);

    Vec2 v{initial[0], initial[1]};
    double drift = 0.0;
    std::size_t steps = 0;

    for (std::size_t j = 0; j < sched.samples.size(); ++j) {
        const cplx d = sched.samples[j];
        const double t0 = static_cast<double>(j) * dev.dt_s;

        if (dev.frame == Frame::rotating_rwa) {
            const cplx dd = frame_phase * d;
            Mat2 ham{};
            ham(1, 1) = kTwoPi * (nu - f);
            // pi Omega (Re dd sigma_x - Im dd sigma_y)
            ham(0, 1) = std::numbers::pi * omega * dd;
            ham(1, 0) = std::numbers::pi * omega * std::conj(dd);
            const auto at = [&ham](double) { return ham; };
            for (int s = 0; s < sub; ++s) v = rk4_step(v, t0 + s * h, h, at);
        } else {
            // The identity part of 2 pi nu |1><1| is restored as a phase after integration.
            const auto at = [&](double t) {
                const double drive = (std::polar(1.0, kTwoPi * f * t + sched.pre_phase) * d).real();
                Mat2 ham{};
                ham(0, 0) = -std::numbers::pi * nu;
                ham(1, 1) = std::numbers::pi * nu;
                ham(0, 1) = ham(1, 0) = kTwoPi * omega * drive;
                return ham;
            };
            for (int s = 0; s < sub; ++s) v = rk4_step(v, t0 + s * h, h, at);
        }
        steps += static_cast<std::size_t>(sub);
        drift = std::max(drift, std::abs(1.0 - vec_norm(v)));
    }

    if (dev.frame == Frame::lab) {
        const double total = static_cast<double>(sched.samples.size()) * dev.dt_s;
        const cplx global = std::polar(1.0, -std::numbers::pi * nu * total);
        v[0] *= global;
        v[1] *= global * std::polar(1.0, kTwoPi * f * total);
    }

    if (!(drift <= kMaxNormDrift)) {
        throw IntegrationError(fmt::format("evolve: norm drift {:.3e} exceeds {:.0e}; increase substeps", drift,
                                           kMaxNormDrift));
    }
    return {PureState::normalized(v[0], v[1]), drift, steps};
}

Unitary2 unitary_of_schedule(const PulseSchedule& sched, const DeviceModel& dev)
{
    const auto c0 = evolve(PureState::basis(0), sched, dev).final_state;
    const auto c1 = evolve(PureState::basis(1), sched, dev).final_state;
    return Unitary2::from_matrix(Mat2{{c0[0], c1[0], c0[1], c1[1]}}, 1e-8);
}

std::vector<SweepPoint> frequency_sweep(const DeviceModel& dev, double f_min, double f_max, int n_points,
                                        const PulseSchedule& probe)
{
    if (!(f_min < f_max) || !std::isfinite(f_min) || !std::isfinite(f_max) || f_min <= 0.0) {
        throw ValidationError("frequency_sweep: need 0 < f_min < f_max");
    }
    if (n_points < 3) throw ValidationError("frequency_sweep: n_points must be >= 3");

    std::vector<SweepPoint> out;
    out.reserve(static_cast<std::size_t>(n_points));
    const double step = (f_max - f_min) / (n_points - 1);
    for (int k = 0; k < n_points; ++k) {
        DeviceModel d = dev;
        d.drive_freq_hz = (k == n_points - 1) ? f_max : f_min + k * step;
        const auto res = evolve(PureState::basis(0), probe, d);
        out.push_back({*d.drive_freq_hz, measure_probs(res.final_state).second});
    }
    return out;
}

double estimate_resonance(const std::vector<SweepPoint>& sweep)
{
    if (sweep.empty()) throw ValidationError("estimate_resonance: empty sweep");
    const SweepPoint* best = &sweep.front();
    for (const auto& p : sweep) {
        if (p.excited_pop > best->excited_pop) best = &p;
    }
    return best->freq_hz;
}

}  // namespace pulseforge
