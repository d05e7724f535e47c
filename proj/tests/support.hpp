#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "pulseforge/pulse.hpp"
#include "pulseforge/quantum.hpp"

namespace oracle {

using pulseforge::cplx;
using pulseforge::Mat2;
using pulseforge::PureState;

inline constexpr double kPi = std::numbers::pi;

struct SquashRow {
    const char* gate;
    double signed_modulus;
    double effective;
};

// Reference (signed modulus, effective signed modulus) pairs for the ten suite gates.
inline constexpr std::array<SquashRow, 10> kSquashRows{{
    {"X", 3.280, 0.9275},
    {"SX", -1.167, -0.5254},
    {"H", 0.2154, 0.1073},
    {"RZ", 1.070, 0.4888},
    {"RY", 2.606, 0.8625},
    {"RX", 1.204, 0.5384},
    {"U_RX", 2.601, 0.8618},
    {"U_RY", 2.977, 0.9031},
    {"U_RZ", 1.987, 0.7589},
    {"3ROT", 2.491, 0.8470},
}};

inline PureState random_state(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    return PureState::normalized({n(rng), n(rng)}, {n(rng), n(rng)});
}

// Random PSD matrix with unit trace; `rank1` makes it pure.
inline Mat2 random_density(std::mt19937_64& rng, bool rank1 = false)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Mat2 b{{cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}}};
    if (rank1) b(1, 0) = b(1, 1) = 0.0;
    Mat2 m = b.adjoint() * b;
    const cplx tr = m.trace();
    return (1.0 / tr) * m;
}

inline double overlap_fidelity(const PureState& a, const PureState& b)
{
    return std::norm(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
}

// Qubit mixed-state fidelity: tr(rho sigma) + 2 sqrt(det rho det sigma).
inline double qubit_fidelity(const Mat2& rho, const Mat2& sigma)
{
    const double tr = (rho * sigma).trace().real();
    const double d = std::max(0.0, rho.det().real()) * std::max(0.0, sigma.det().real());
    return tr + 2.0 * std::sqrt(d);
}

inline Mat2 outer(const PureState& s)
{
    return Mat2{{s[0] * std::conj(s[0]), s[0] * std::conj(s[1]), s[1] * std::conj(s[0]), s[1] * std::conj(s[1])}};
}

inline PureState mul(const Mat2& m, const PureState& s)
{
    return PureState::normalized(m(0, 0) * s[0] + m(0, 1) * s[1], m(1, 0) * s[0] + m(1, 1) * s[1]);
}

// Lifted Gaussian evaluated from scratch.
inline double lifted_gaussian(double t, double duration, double sigma)
{
    const auto G = [&](double x) { return std::exp(-(x - duration / 2) * (x - duration / 2) / (2 * sigma * sigma)); };
    return (G(t) - G(0.0)) / (1.0 - G(0.0));
}

// Excited population after a constant drive of Rabi rate `rabi` (rad/s) and
// detuning `delta` (rad/s) for time t, starting from |0>.
inline double rabi_p1(double rabi, double delta, double t)
{
    const double gen = std::sqrt(rabi * rabi + delta * delta);
    if (gen == 0.0) return 0.0;
    const double s = std::sin(0.5 * gen * t);
    return rabi * rabi / (gen * gen) * s * s;
}

// Five-point central difference, O(h^4).
inline double richardson(const std::function<double(double)>& f, double x, double h)
{
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace oracle
