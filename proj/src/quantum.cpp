#include "pulseforge/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pulseforge/error.hpp"

namespace pulseforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHermitianTol = 1e-10;
constexpr double kNegativeEigenTol = 1e-10;

struct HermitianSqrt {
    Mat2 root;
    double sqrt_det;  // sqrt(lambda_max * lambda_min), eigenvalues clamped at 0
};

// Closed-form principal root of a Hermitian PSD 2x2 matrix. By Cayley-Hamilton,
// sqrt(M) = (M + s I) / t with s = sqrt(det M) and t = sqrt(l+) + sqrt(l-).
HermitianSqrt hermitian_sqrt(const Mat2& m)
{
    const cplx off = m(0, 1) - std::conj(m(1, 0));
    if (std::abs(off) > kHermitianTol || std::abs(m(0, 0).imag()) > kHermitianTol ||
        std::abs(m(1, 1).imag()) > kHermitianTol) {
        throw InvariantError("matrix_sqrt_psd: input is not Hermitian");
    }
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));

    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(b));
    const double hi = mean + radius;
    double lo = mean - radius;
    if (lo < -kNegativeEigenTol) {
        throw InvariantError("matrix_sqrt_psd: eigenvalue " + std::to_string(lo) + " is negative");
    }
    lo = std::max(lo, 0.0);

    if (hi <= 0.0) {
        return {Mat2{}, 0.0};
    }
    const double s = std::sqrt(hi * lo);
    const double t = std::sqrt(hi) + std::sqrt(lo);
    Mat2 root{{cplx{(a + s) / t}, b / t, std::conj(b) / t, cplx{(d + s) / t}}};
    return {root, s};
}

bool is_hermitian(const Mat2& m, double tol)
{
    return std::abs(m(0, 1) - std::conj(m(1, 0))) <= tol && std::abs(m(0, 0).imag()) <= tol &&
           std::abs(m(1, 1).imag()) <= tol;
}

}  // namespace

Mat2 Mat2::adjoint() const
{
    return Mat2{{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}};
}

double Mat2::max_abs() const
{
    double out = 0.0;
    for (const auto& v : a) out = std::max(out, std::abs(v));
    return out;
}

Mat2 operator*(const Mat2& x, const Mat2& y)
{
    Mat2 r;
    r(0, 0) = x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0);
    r(0, 1) = x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1);
    r(1, 0) = x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0);
    r(1, 1) = x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1);
    return r;
}

Mat2 operator+(const Mat2& x, const Mat2& y)
{
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

Mat2 operator-(const Mat2& x, const Mat2& y)
{
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

Mat2 operator*(cplx s, const Mat2& x)
{
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = s * x.a[i];
    return r;
}

// ---------------------------------------------------------------------------
// PureState

PureState PureState::basis(int k)
{
    if (k != 0 && k != 1) throw InvariantError("PureState::basis: index must be 0 or 1");
    return k == 0 ? PureState(1.0, 0.0) : PureState(0.0, 1.0);
}

PureState PureState::from_amplitudes(cplx a0, cplx a1)
{
    const double n2 = std::norm(a0) + std::norm(a1);
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-10) {
        throw InvariantError("PureState: squared norm " + std::to_string(n2) + " is not 1");
    }
    return PureState(a0, a1);
}

PureState PureState::normalized(cplx a0, cplx a1)
{
    const double n = std::sqrt(std::norm(a0) + std::norm(a1));
    if (!(n > 0.0) || !std::isfinite(n)) throw InvariantError("PureState: cannot normalize a zero vector");
    return PureState(a0 / n, a1 / n);
}

double PureState::norm() const
{
    return std::sqrt(std::norm(amp_[0]) + std::norm(amp_[1]));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_matrix(const Mat2& m)
{
    if (!is_hermitian(m, 1e-12)) throw InvariantError("DensityMatrix: not Hermitian");
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > 1e-12) {
        throw InvariantError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
    }
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double lo = 0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    if (lo < -1e-10) throw InvariantError("DensityMatrix: negative eigenvalue");
    return DensityMatrix(m);
}

double DensityMatrix::purity() const
{
    return (m_ * m_).trace().real();
}

// ---------------------------------------------------------------------------
// Unitary2

Unitary2 Unitary2::from_matrix(const Mat2& m, double tol)
{
    Unitary2 u(m);
    const double err = u.unitarity_error();
    if (!(err <= tol)) {
        throw InvariantError("Unitary2: U^dagger U deviates from I by " + std::to_string(err));
    }
    return u;
}

double Unitary2::unitarity_error() const
{
    return (m_.adjoint() * m_ - Mat2::identity()).max_abs();
}

// ---------------------------------------------------------------------------
// States and gates

PureState bloch_state(double theta, double phi)
{
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    double p = phi;
    if (t > kPi) {
        t = 2.0 * kPi - t;
        p += kPi;
    }
    p = std::fmod(p, 2.0 * kPi);
    if (p < 0.0) p += 2.0 * kPi;

    const double c = std::cos(0.5 * t);
    const double s = std::sin(0.5 * t);
    return PureState::from_amplitudes(c, std::polar(s, p));
}

Unitary2 gate_id()
{
    return Unitary2::from_matrix(Mat2::identity());
}

Unitary2 gate_h()
{
    const double r = 1.0 / std::numbers::sqrt2;
    return Unitary2::from_matrix(Mat2{{cplx{r}, cplx{r}, cplx{r}, cplx{-r}}});
}

Unitary2 gate_x()
{
    return Unitary2::from_matrix(pauli::x);
}

Unitary2 gate_sx()
{
    const cplx p{0.5, 0.5};
    const cplx m{0.5, -0.5};
    return Unitary2::from_matrix(Mat2{{p, m, m, p}});
}

Unitary2 gate_rx(double angle)
{
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    return Unitary2::from_matrix(Mat2{{cplx{c}, cplx{0, -s}, cplx{0, -s}, cplx{c}}});
}

Unitary2 gate_ry(double angle)
{
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    return Unitary2::from_matrix(Mat2{{cplx{c}, cplx{-s}, cplx{s}, cplx{c}}});
}

Unitary2 gate_rz(double angle)
{
    return Unitary2::from_matrix(
        Mat2{{std::polar(1.0, -0.5 * angle), cplx{0}, cplx{0}, std::polar(1.0, 0.5 * angle)}});
}

Unitary2 gate_u(double dtheta, double dchi, double dlambda)
{
    const double c = std::cos(0.5 * dtheta);
    const double s = std::sin(0.5 * dtheta);
    return Unitary2::from_matrix(Mat2{{cplx{c}, -std::polar(s, dlambda), std::polar(s, dchi),
                                       std::polar(c, dchi + dlambda)}});
}

Unitary2 three_rot(double w)
{
    return gate_ry(-w) * gate_rz(w) * gate_ry(w);
}

PureState apply(const Unitary2& gate, const PureState& state)
{
    const auto& u = gate.matrix();
    const cplx a0 = u(0, 0) * state[0] + u(0, 1) * state[1];
    const cplx a1 = u(1, 0) * state[0] + u(1, 1) * state[1];
    return PureState::from_amplitudes(a0, a1);
}

DensityMatrix density_of(const PureState& state)
{
    const cplx a0 = state[0];
    const cplx a1 = state[1];
    Mat2 m{{cplx{std::norm(a0)}, a0 * std::conj(a1), a1 * std::conj(a0), cplx{std::norm(a1)}}};
    return DensityMatrix::from_matrix(m);
}

Mat2 matrix_sqrt_psd(const Mat2& m)
{
    return hermitian_sqrt(m).root;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    // For M = sqrt(rho) sigma sqrt(rho), tr sqrt(M) = sqrt(tr M + 2 sqrt(det M)).
    // det M is taken as det(sqrt(rho))^2 det(sigma) so that rank-1 inputs do
    // not pick up a sqrt(eps) error from cancellation inside M's entries.
    const auto root = hermitian_sqrt(rho.matrix());
    const Mat2 inner = root.root * sigma.matrix() * root.root;
    const double tr = inner.trace().real();
    const Mat2& s = sigma.matrix();
    const double det_sigma = std::max(0.0, s(0, 0).real() * s(1, 1).real() - std::norm(s(0, 1)));
    const double det_inner = root.sqrt_det * root.sqrt_det * det_sigma;
    const double f = tr + 2.0 * std::sqrt(det_inner);
    if (!std::isfinite(f) || f > 1.0 + 1e-9) {
        throw InvariantError("fidelity: value " + std::to_string(f) + " outside [0, 1]");
    }
    return std::clamp(f, 0.0, 1.0);
}

std::pair<double, double> measure_probs(const PureState& state)
{
    return {std::norm(state[0]), std::norm(state[1])};
}

}  // namespace pulseforge
