#pragma once

// DRAG pulse model: the six trainable parameters, the signed-modulus squashing
// map, envelope sampling and the carrier-modulated drive signal.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "pulseforge/quantum.hpp"

namespace pulseforge {

/// Sign convention of the signed-modulus squashing map.
enum class SquashSign {
    /// tanh(x/2) = (e^x - 1)/(e^x + 1).
    standard,
    /// (1 - e^x)/(1 + e^x), the mirror image. Kept for compatibility.
    mirrored,
};

double squash(double x, SquashSign sign = SquashSign::standard);
/// Inverse of squash on (-1, 1).
double unsquash(double y, SquashSign sign = SquashSign::standard);

/// The trainable parameters of one DRAG pulse preceded by a ShiftPhase.
/// duration and variance are in units of dt.
struct PulseParams {
    double duration = 64.0;
    double signed_modulus = 0.5;  // raw r, squashed before use
    double argument = 0.0;        // alpha
    double variance = 16.0;       // Gaussian width sigma_g
    double correction_amplitude = 0.0;  // DRAG beta
    double phase = 0.0;           // ShiftPhase applied before the pulse

    static constexpr std::size_t size = 6;
    using Vector = std::array<double, size>;

    Vector to_vector() const;
    static PulseParams from_vector(const Vector& v);

    double effective_modulus(SquashSign sign = SquashSign::standard) const
    {
        return squash(signed_modulus, sign);
    }
    /// Complex amplitude r_e e^{i alpha}.
    cplx amplitude(SquashSign sign = SquashSign::standard) const;
    /// Number of samples, round(duration).
    std::size_t sample_count() const;

    friend bool operator==(const PulseParams&, const PulseParams&) = default;
};

struct ParamBounds {
    double duration_min = 8.0;
    double duration_max = 512.0;
    double variance_min = 1.0;
    double variance_max = 512.0;
};

PulseParams clamp(const PulseParams& p, const ParamBounds& bounds = {});

/// Throws InvariantError if duration/variance are outside the bounds or any field is non-finite.
void validate(const PulseParams& p, const ParamBounds& bounds = {});

struct PulseSchedule {
    std::vector<cplx> samples;
    double pre_phase = 0.0;
    std::optional<PulseParams> source;

    std::size_t size() const { return samples.size(); }
    double peak() const;
};

/// A(g(t) + i beta g'(t)) with A = r_e e^{i alpha} and g the Gaussian lifted so
/// that g(0) = g(duration) = 0 and g(duration/2) = 1.
///
/// Throws AmplitudeCapError if the magnitude at t exceeds 1.
cplx drag_envelope(const PulseParams& p, double t, SquashSign sign = SquashSign::standard);

/// Midpoint samples d_j = envelope(j + 0.5), j = 0..round(duration)-1.
/// Throws AmplitudeCapError if any sample exceeds unit magnitude.
PulseSchedule sample_schedule(const PulseParams& p, SquashSign sign = SquashSign::standard);

/// Schedule used during training. When the raw peak exceeds 1 every sample is
/// scaled so the peak becomes 0.999; `excess` is raw peak - 1 (0 otherwise).
struct CappedSchedule {
    PulseSchedule schedule;
    double excess = 0.0;
};
CappedSchedule capped_schedule(const PulseParams& p, SquashSign sign = SquashSign::standard);

/// Re[e^{i(2 pi f j dt + phi_total)} d_j] with phi_total = channel_phase + pre_phase.
/// Throws std::out_of_range for j >= n.
double drive_signal(const PulseSchedule& sched, double freq_hz, std::size_t j, double dt_s,
                    double channel_phase = 0.0);

/// Channel phase after a ShiftPhase instruction.
inline double shift_phase(double channel_phase, double delta)
{
    return channel_phase + delta;
}

}  // namespace pulseforge
