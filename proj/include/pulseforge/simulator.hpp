#pragma once

// Schrodinger-equation integrator for a two-level qubit driven through a
// single drive channel.
//
// Lab frame:       H/hbar = 2 pi nu |1><1| + 2 pi Omega D(t) sigma_x,
//                  D(t) = Re[e^{i(2 pi f t + phi)} d_j] for t in [j dt, (j+1) dt)
// Rotating frame:  H/hbar = 2 pi (nu - f) |1><1| + pi Omega (Re d~ sigma_x - Im d~ sigma_y),
//                  d~ = e^{i phi} d_j, counter-rotating terms dropped.
//
// Results from both frames are expressed in the frame rotating at the drive
// frequency f, so they can be compared with each other and with target gates.

#include <cstddef>
#include <optional>
#include <vector>

#include "pulseforge/pulse.hpp"
#include "pulseforge/quantum.hpp"

namespace pulseforge {

enum class Frame { lab, rotating_rwa };

struct DeviceModel {
    double qubit_freq_hz = 4.972e9;
    double drive_strength_hz = 0.08e9;
    double dt_s = 0.222e-9;
    /// Carrier frequency; defaults to the qubit frequency.
    std::optional<double> drive_freq_hz;
    /// RK4 steps per sample; defaults depend on the frame (see default_substeps).
    std::optional<int> substeps;
    Frame frame = Frame::rotating_rwa;

    double carrier_hz() const { return drive_freq_hz.value_or(qubit_freq_hz); }
    int effective_substeps() const { return substeps.value_or(default_substeps(frame)); }
    static int default_substeps(Frame f) { return f == Frame::lab ? 400 : 4; }

    /// Throws ValidationError unless frequencies, dt and substeps are positive.
    void validate() const;
};

struct EvolutionResult {
    PureState final_state;
    /// max |1 - ||psi||| at sample boundaries, measured before the final renormalization.
    double norm_drift = 0.0;
    std::size_t wall_steps = 0;
};

inline constexpr double kMaxNormDrift = 1e-9;

/// Integrates the qubit from `initial` through the schedule. The schedule's
/// pre_phase acts as a ShiftPhase on the drive channel.
///
/// Throws AmplitudeCapError for samples above unit magnitude and
/// IntegrationError when the norm drift exceeds kMaxNormDrift.
EvolutionResult evolve(const PureState& initial, const PulseSchedule& sched, const DeviceModel& dev);

/// Columns are the evolved basis states; validated unitary within 1e-8.
Unitary2 unitary_of_schedule(const PulseSchedule& sched, const DeviceModel& dev);

struct SweepPoint {
    double freq_hz;
    double excited_pop;
};

/// Evolves |0> under `probe` for each carrier on a uniform grid over [f_min, f_max].
/// Throws ValidationError unless f_min < f_max and n_points >= 3.
std::vector<SweepPoint> frequency_sweep(const DeviceModel& dev, double f_min, double f_max,
                                        int n_points, const PulseSchedule& probe);

/// Carrier of the sweep point with the largest excited population (first on ties).
double estimate_resonance(const std::vector<SweepPoint>& sweep);

}  // namespace pulseforge
