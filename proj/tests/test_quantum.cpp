#include <doctest.h>

#include <random>

#include "pulseforge/error.hpp"
#include "pulseforge/quantum.hpp"
#include "support.hpp"

using namespace pulseforge;
using oracle::kPi;

namespace {

double dist(const Mat2& a, const Mat2& b)
{
    return (a - b).max_abs();
}

// Largest |entry| of U after removing the best global phase against V.
double phase_dist(const Unitary2& u, const Unitary2& v)
{
    const cplx overlap = (v.matrix().adjoint() * u.matrix()).trace();
    const cplx ph = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx{1};
    return dist(u.matrix(), ph * v.matrix());
}

}  // namespace

TEST_CASE("bloch_state amplitudes and angle folding")
{
    const auto s0 = bloch_state(0, 0);
    CHECK(std::abs(s0[0] - 1.0) < 1e-15);
    CHECK(std::abs(s0[1]) < 1e-15);

    const auto s1 = bloch_state(kPi, 0);
    CHECK(std::abs(s1[0]) < 1e-15);
    CHECK(std::abs(s1[1] - 1.0) < 1e-15);

    const auto plus = bloch_state(kPi / 2, 0);
    CHECK(plus[0].real() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(plus[1].real() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));

    // theta past pi folds to the same ray
    const auto a = bloch_state(1.3 * kPi, 0.4);
    const auto b = bloch_state(0.7 * kPi, 0.4 + kPi);
    CHECK(oracle::overlap_fidelity(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("PureState rejects unnormalized amplitudes")
{
    CHECK_THROWS_AS(PureState::from_amplitudes(1.0, 1.0), InvariantError);
    CHECK_THROWS_AS(PureState::normalized(0.0, 0.0), InvariantError);
    CHECK_NOTHROW(PureState::from_amplitudes(0.6, cplx{0, 0.8}));
}

TEST_CASE("library gates are unitary and match their matrices")
{
    const double r = 1 / std::sqrt(2.0);
    CHECK(dist(gate_h().matrix(), Mat2{{r, r, r, -r}}) < 1e-15);
    CHECK(dist(gate_x().matrix(), pauli::x) < 1e-15);
    CHECK(dist((gate_sx() * gate_sx()).matrix(), pauli::x) < 1e-14);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi);
    for (int i = 0; i < 50; ++i) {
        const double a = ang(rng), b = ang(rng), c = ang(rng);
        for (const auto& g : {gate_rx(a), gate_ry(a), gate_rz(a), gate_u(a, b, c), three_rot(a),
                              gate_u(a, b, c) * gate_rx(b) * three_rot(c)}) {
            CHECK(g.unitarity_error() < 1e-10);
        }
    }
}

TEST_CASE("rotations follow exp(-i a sigma / 2)")
{
    const double a = 0.731;
    const auto expo = [a](const Mat2& s) {
        return std::cos(a / 2) * Mat2::identity() - cplx{0, std::sin(a / 2)} * s;
    };
    CHECK(dist(gate_rx(a).matrix(), expo(pauli::x)) < 1e-15);
    CHECK(dist(gate_ry(a).matrix(), expo(pauli::y)) < 1e-15);
    CHECK(dist(gate_rz(a).matrix(), expo(pauli::z)) < 1e-15);
}

TEST_CASE("gate_u special cases")
{
    CHECK(phase_dist(gate_u(kPi / 2, 0, kPi), gate_h()) < 1e-12);
    CHECK(phase_dist(gate_u(kPi, 0, kPi), gate_x()) < 1e-12);
    CHECK(phase_dist(gate_u(0, 0, 0.9), gate_rz(0.9)) < 1e-12);
    CHECK(phase_dist(gate_u(0.9, 0, 0), gate_ry(0.9)) < 1e-12);
    CHECK(phase_dist(gate_u(0.9, -kPi / 2, kPi / 2), gate_rx(0.9)) < 1e-12);
    // With chi = pi the z rotation picks up an extra pi.
    CHECK(phase_dist(gate_u(0, kPi, 0.4), gate_rz(0.4 + kPi)) < 1e-12);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        const auto s = oracle::random_state(rng);
        const auto a = density_of(apply(gate_u(kPi / 2, 0, kPi), s));
        const auto b = density_of(apply(gate_h(), s));
        CHECK(fidelity(a, b) >= 1 - 1e-10);
    }
}

TEST_CASE("three_rot composes the rotations")
{
    const double w = kPi / 4;
    CHECK(dist(three_rot(w).matrix(), (gate_ry(-w) * gate_rz(w) * gate_ry(w)).matrix()) < 1e-15);
    CHECK(dist(three_rot(0).matrix(), Mat2::identity()) < 1e-15);
}

TEST_CASE("S SX S equals H up to phase")
{
    const auto s = gate_rz(kPi / 2);
    const auto p = (s * gate_sx() * s).matrix();
    const auto h = gate_h().matrix();
    const cplx ph = p(0, 0) / h(0, 0);
    CHECK(std::abs(std::abs(ph) - 1) < 1e-14);
    CHECK(dist(p, ph * h) < 1e-14);
}

TEST_CASE("matrix_sqrt_psd")
{
    CHECK(dist(matrix_sqrt_psd(Mat2::identity()), Mat2::identity()) < 1e-15);
    CHECK(dist(matrix_sqrt_psd(Mat2{{4.0, 0.0, 0.0, 9.0}}), Mat2{{2.0, 0.0, 0.0, 3.0}}) < 1e-14);
    CHECK(dist(matrix_sqrt_psd(Mat2{}), Mat2{}) < 1e-15);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const Mat2 m = oracle::random_density(rng, i % 2 == 0);
        const Mat2 s = matrix_sqrt_psd(m);
        CHECK(dist(s * s, m) < 1e-9);
        CHECK(dist(s, s.adjoint()) < 1e-12);
        CHECK(s.trace().real() >= 0);
    }

    CHECK_THROWS_AS(matrix_sqrt_psd(Mat2{{1.0, 1.0, 0.0, 1.0}}), InvariantError);
    CHECK_THROWS_AS(matrix_sqrt_psd(Mat2{{1.0, 0.0, 0.0, -0.1}}), InvariantError);
}

TEST_CASE("fidelity axioms and oracles")
{
    const auto r0 = density_of(PureState::basis(0));
    const auto r1 = density_of(PureState::basis(1));
    CHECK(fidelity(r0, r0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(r0, r1) == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto a = oracle::random_state(rng);
        const auto b = oracle::random_state(rng);
        const auto ra = density_of(a), rb = density_of(b);
        const double f = fidelity(ra, rb);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(std::abs(f - oracle::overlap_fidelity(a, b)) < 1e-9);
        CHECK(std::abs(f - fidelity(rb, ra)) < 1e-10);
        CHECK(std::abs(fidelity(ra, ra) - 1.0) < 1e-10);

        const cplx g = std::polar(1.0, 6.0 * i / 200.0);
        const auto shifted = PureState::normalized(g * a[0], g * a[1]);
        CHECK(std::abs(fidelity(ra, density_of(shifted)) - 1.0) < 1e-12);

        const auto ma = DensityMatrix::from_matrix(oracle::random_density(rng));
        const auto mb = DensityMatrix::from_matrix(oracle::random_density(rng));
        CHECK(std::abs(fidelity(ma, mb) - oracle::qubit_fidelity(ma.matrix(), mb.matrix())) < 1e-9);
        CHECK(std::abs(fidelity(ma, mb) - fidelity(mb, ma)) < 1e-10);
    }
}

TEST_CASE("DensityMatrix validation")
{
    CHECK_THROWS_AS(DensityMatrix::from_matrix(Mat2{{1.0, 0.0, 0.0, 1.0}}), InvariantError);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(Mat2{{0.5, 0.7, 0.0, 0.5}}), InvariantError);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(Mat2{{1.2, 0.0, 0.0, -0.2}}), InvariantError);
    const auto mixed = DensityMatrix::from_matrix(Mat2{{0.5, 0.0, 0.0, 0.5}});
    CHECK(mixed.purity() == doctest::Approx(0.5));
}

TEST_CASE("measure_probs")
{
    const auto [p0, p1] = measure_probs(PureState::basis(0));
    CHECK(p0 == 1.0);
    CHECK(p1 == 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, kPi);
    for (int i = 0; i < 50; ++i) {
        const double th = u(rng), ph = 2 * u(rng);
        const auto [a, b] = measure_probs(bloch_state(th, ph));
        CHECK(std::abs(a - std::cos(th / 2) * std::cos(th / 2)) < 1e-14);
        CHECK(std::abs(b - std::sin(th / 2) * std::sin(th / 2)) < 1e-14);
        CHECK(std::abs(a + b - 1) < 1e-12);
    }
    const auto [e0, e1] = measure_probs(bloch_state(kPi / 2, 1.0));
    CHECK(e0 == doctest::Approx(0.5));
    CHECK(e1 == doctest::Approx(0.5));
}
