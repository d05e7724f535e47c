#include <doctest.h>

#include <random>
#include <stdexcept>

#include "pulseforge/error.hpp"
#include "pulseforge/pulse.hpp"
#include "support.hpp"

using namespace pulseforge;
using oracle::kPi;

TEST_CASE("squash reproduces the reference modulus pairs")
{
    CHECK(std::abs(squash(3.280) - 0.9275) <= 5e-4);
    CHECK(std::abs(squash(-1.167) + 0.5254) <= 5e-4);
    CHECK(squash(0.0) == 0.0);
    for (const auto& row : oracle::kSquashRows) {
        INFO(row.gate);
        CHECK(std::abs(squash(row.signed_modulus) - row.effective) <= 5e-4);
        // closed form (e^x - 1)/(e^x + 1)
        const double e = std::exp(row.signed_modulus);
        CHECK(std::abs(squash(row.signed_modulus) - (e - 1) / (e + 1)) < 1e-15);
    }
}

TEST_CASE("squash is odd, increasing, bounded and invertible")
{
    double prev = -1.0;
    for (double x = -20; x <= 20; x += 0.01) {
        const double y = squash(x);
        CHECK(y > -1.0);
        CHECK(y < 1.0);
        CHECK(y >= prev);
        CHECK(squash(-x) == -y);
        prev = y;
        // Near |y| = 1 the double spacing limits how well x can be recovered.
        CHECK(std::abs(unsquash(y) - x) < (std::abs(x) <= 12 ? 1e-10 : 1e-7));
    }
    CHECK(squash(1.0, SquashSign::mirrored) == -squash(1.0));
    CHECK(unsquash(squash(0.7, SquashSign::mirrored), SquashSign::mirrored) == doctest::Approx(0.7));
}

TEST_CASE("drag_envelope landmarks")
{
    PulseParams p;
    p.duration = 64.3;
    p.signed_modulus = 1.1;
    p.argument = 0.4;
    p.variance = 12.0;
    p.correction_amplitude = 2.5;
    const cplx amp = squash(1.1) * std::polar(1.0, 0.4);

    CHECK(std::abs(drag_envelope(p, p.duration / 2) - amp) < 1e-15);

    for (double t : {0.0, p.duration}) {
        const cplx v = drag_envelope(p, t) / amp;
        CHECK(std::abs(v.real()) < 1e-15);
        // lifted derivative at the edge
        const double c = p.duration / 2;
        const double G0 = std::exp(-c * c / (2 * 144.0));
        const double dg = -(t - c) / 144.0 * G0 / (1 - G0);
        CHECK(std::abs(v.imag() - 2.5 * dg) < 1e-14);
    }

    p.correction_amplitude = 0.0;
    for (int k = 0; k <= 50; ++k) {
        const double t = p.duration * k / 50.0;
        const cplx v = drag_envelope(p, t);
        CHECK(std::abs(v - amp * oracle::lifted_gaussian(t, p.duration, p.variance)) < 1e-14);
    }

    // derivative term matches a numerical derivative of the real part
    p.correction_amplitude = 1.0;
    PulseParams q = p;
    q.correction_amplitude = 0.0;
    for (double t : {5.0, 20.0, 40.0}) {
        const double h = 1e-4;
        const cplx num = (drag_envelope(q, t + h) - drag_envelope(q, t - h)) / (2 * h);
        const cplx im = drag_envelope(p, t) - drag_envelope(q, t);
        CHECK(std::abs(im - cplx{0, 1} * num) < 1e-9);
    }
}

TEST_CASE("drag_envelope enforces the magnitude cap")
{
    PulseParams p;
    p.signed_modulus = 8.0;
    p.variance = 2.0;
    p.correction_amplitude = 6.0;
    CHECK_THROWS_AS(sample_schedule(p), AmplitudeCapError);
    const auto capped = capped_schedule(p);
    CHECK(capped.excess > 0.0);
    CHECK(capped.schedule.peak() == doctest::Approx(0.999));

    PulseParams ok;
    CHECK(capped_schedule(ok).excess == 0.0);
    CHECK(capped_schedule(ok).schedule.samples == sample_schedule(ok).samples);
}

TEST_CASE("sample_schedule layout")
{
    PulseParams p;
    p.signed_modulus = 0.0;
    const auto zero = sample_schedule(p);
    CHECK(zero.size() == 64);
    for (const auto& d : zero.samples) CHECK(d == cplx{0});

    for (double dur : {8.0, 63.4, 63.6, 100.5, 511.9}) {
        p.duration = dur;
        CHECK(sample_schedule(p).size() == static_cast<std::size_t>(std::lround(dur)));
    }

    p = PulseParams{};
    p.duration = 80.2;
    p.phase = 0.3;
    p.correction_amplitude = 0.7;
    const auto s = sample_schedule(p);
    CHECK(s.pre_phase == 0.3);
    REQUIRE(s.source.has_value());
    CHECK(*s.source == p);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(s.samples[j] == drag_envelope(p, j + 0.5));
}

TEST_CASE("sample sum matches the envelope integral")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dur(40, 300), sig(4, 40);
    for (int i = 0; i < 20; ++i) {
        PulseParams p;
        p.duration = std::round(dur(rng));
        p.variance = sig(rng);
        p.correction_amplitude = 0.3;
        cplx sum = 0;
        for (const auto& d : sample_schedule(p).samples) sum += d;
        // Simpson on a fine grid
        const int m = 4000;
        const double h = p.duration / m;
        cplx integral = drag_envelope(p, 0) + drag_envelope(p, p.duration);
        for (int k = 1; k < m; ++k) integral += (k % 2 ? 4.0 : 2.0) * drag_envelope(p, k * h);
        integral *= h / 3;
        CHECK(std::abs(sum - integral) <= 0.01 * std::abs(integral));
    }
}

TEST_CASE("drive_signal and shift_phase")
{
    PulseSchedule s;
    s.samples = {cplx{1.0}, cplx{1.0}, cplx{0.3, -0.4}};
    // f j dt integer -> carrier peak
    CHECK(drive_signal(s, 1e9, 2, 1e-9) == doctest::Approx(0.3));
    CHECK(drive_signal(s, 5e9, 1, 1e-9) == doctest::Approx(1.0));
    CHECK(std::abs(drive_signal(s, 5e9, 0, 1e-9, kPi / 2)) < 1e-15);
    CHECK_THROWS_AS(drive_signal(s, 5e9, 3, 1e-9), std::out_of_range);

    CHECK(shift_phase(0.0, kPi) == kPi);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 100; ++i) {
        const cplx d{u(rng) * 0.7, u(rng) * 0.7};
        const double f = 4.5e9 + 1e9 * u(rng);
        const double phi = 3 * u(rng);
        const std::size_t j = static_cast<std::size_t>(i % 3);
        PulseSchedule t;
        t.samples = {d, d, d};
        const double a = 2 * kPi * f * static_cast<double>(j) * 0.222e-9 + phi;
        const double expected = std::cos(a) * d.real() - std::sin(a) * d.imag();
        CHECK(std::abs(drive_signal(t, f, j, 0.222e-9, phi) - expected) < 1e-12);

        // a phase shift equals rotating every sample
        const double delta = 2 * u(rng);
        PulseSchedule r = t;
        for (auto& x : r.samples) x *= std::polar(1.0, delta);
        CHECK(std::abs(drive_signal(t, f, j, 0.222e-9, shift_phase(phi, delta)) -
                       drive_signal(r, f, j, 0.222e-9, phi)) < 1e-12);

        // two shifts of pi are a full turn
        CHECK(std::abs(drive_signal(t, f, j, 0.222e-9, shift_phase(shift_phase(phi, kPi), kPi)) -
                       drive_signal(t, f, j, 0.222e-9, phi)) < 1e-12);
    }
}

TEST_CASE("parameter vector, clamping and validation")
{
    PulseParams p;
    p.duration = 3.0;
    p.variance = 1000.0;
    const auto c = clamp(p);
    CHECK(c.duration == 8.0);
    CHECK(c.variance == 512.0);
    CHECK_THROWS_AS(validate(p), InvariantError);
    CHECK_NOTHROW(validate(c));
    CHECK(PulseParams::from_vector(c.to_vector()) == c);

    PulseParams n;
    n.argument = std::nan("");
    CHECK_THROWS_AS(validate(n), InvariantError);
}

TEST_CASE("envelope is continuous in every parameter")
{
    PulseParams p;
    p.duration = 70.0;
    p.signed_modulus = 0.9;
    p.variance = 14.0;
    p.correction_amplitude = 0.4;
    const auto base = p.to_vector();
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto x = base;
        x[i] += 1e-7;
        const auto q = PulseParams::from_vector(x);
        for (double t : {3.0, 20.0, 35.0, 60.0}) {
            const cplx d = drag_envelope(q, t) - drag_envelope(p, t);
            CHECK(std::isfinite(std::abs(d) / 1e-7));
            CHECK(std::abs(d) < 1e-5);
        }
    }
}
