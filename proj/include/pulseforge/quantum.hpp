#pragma once

// Single-qubit linear algebra: pure states, density matrices, gates and the
// Uhlmann fidelity used as the training cost.

#include <array>
#include <complex>
#include <utility>

namespace pulseforge {

using cplx = std::complex<double>;

/// Plain 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> a{};

    constexpr cplx& operator()(int r, int c) { return a[2 * r + c]; }
    constexpr const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

    static constexpr Mat2 identity() { return Mat2{{cplx{1}, cplx{0}, cplx{0}, cplx{1}}}; }

    Mat2 adjoint() const;
    cplx trace() const { return a[0] + a[3]; }
    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }
    /// Largest absolute entry.
    double max_abs() const;
};

Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator+(const Mat2& x, const Mat2& y);
Mat2 operator-(const Mat2& x, const Mat2& y);
Mat2 operator*(cplx s, const Mat2& x);

namespace pauli {
inline constexpr Mat2 x{{cplx{0}, cplx{1}, cplx{1}, cplx{0}}};
inline constexpr Mat2 y{{cplx{0}, cplx{0, -1}, cplx{0, 1}, cplx{0}}};
inline constexpr Mat2 z{{cplx{1}, cplx{0}, cplx{0}, cplx{-1}}};
}  // namespace pauli

class PureState {
public:
    /// |0> or |1>.
    static PureState basis(int k);
    /// Accepts amplitudes already normalized to within 1e-10; throws InvariantError otherwise.
    static PureState from_amplitudes(cplx a0, cplx a1);
    /// Scales a non-zero vector to unit norm.
    static PureState normalized(cplx a0, cplx a1);

    cplx operator[](int k) const { return amp_[k]; }
    const std::array<cplx, 2>& amplitudes() const { return amp_; }
    double norm() const;

private:
    PureState(cplx a0, cplx a1) : amp_{a0, a1} {}
    std::array<cplx, 2> amp_;
};

class DensityMatrix {
public:
    /// Validates hermiticity and unit trace (1e-12) and eigenvalues >= -1e-10.
    static DensityMatrix from_matrix(const Mat2& m);

    const Mat2& matrix() const { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }
    double purity() const;

private:
    explicit DensityMatrix(const Mat2& m) : m_(m) {}
    Mat2 m_;
};

class Unitary2 {
public:
    /// Validates U^dagger U = I within `tol`.
    static Unitary2 from_matrix(const Mat2& m, double tol = 1e-10);

    const Mat2& matrix() const { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }
    Unitary2 adjoint() const { return Unitary2(m_.adjoint()); }
    /// Largest entry of |U^dagger U - I|.
    double unitarity_error() const;

    friend Unitary2 operator*(const Unitary2& x, const Unitary2& y) { return Unitary2(x.m_ * y.m_); }

private:
    explicit Unitary2(const Mat2& m) : m_(m) {}
    Mat2 m_;
};

/// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
///
/// Angles outside theta in [0, pi], phi in [0, 2pi) are folded back into that
/// range before evaluation. theta is reduced modulo 2pi, and theta in (pi, 2pi)
/// maps to (2pi - theta, phi + pi). The folded state equals the unreduced
/// formula up to a global sign.
PureState bloch_state(double theta, double phi);

Unitary2 gate_id();
Unitary2 gate_h();
Unitary2 gate_x();
Unitary2 gate_sx();
/// R_a(angle) = exp(-i angle sigma_a / 2).
Unitary2 gate_rx(double angle);
Unitary2 gate_ry(double angle);
Unitary2 gate_rz(double angle);

/// General single-qubit gate
///   [[cos(t/2),            -e^{i l} sin(t/2)],
///    [e^{i c} sin(t/2),  e^{i(c+l)} cos(t/2)]]
/// with t = dtheta, c = dchi, l = dlambda. gate_u(pi/2, 0, pi) is exactly H and
/// gate_u(0, c, l) is a z rotation by c + l up to global phase.
Unitary2 gate_u(double dtheta, double dchi, double dlambda);

/// Ry(-w) Rz(w) Ry(w); the rightmost factor acts first.
Unitary2 three_rot(double w);

/// U psi. Throws InvariantError if the result leaves the unit sphere by more than 1e-10.
PureState apply(const Unitary2& gate, const PureState& state);

/// |psi><psi|.
DensityMatrix density_of(const PureState& state);

/// Principal square root of a 2x2 Hermitian PSD matrix via its closed-form
/// eigen-decomposition. Eigenvalues in [-1e-10, 0) are treated as zero.
/// Throws InvariantError on non-Hermitian input (1e-10) or a more negative eigenvalue.
Mat2 matrix_sqrt_psd(const Mat2& m);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
/// Overshoot above 1 + 1e-9 is reported as InvariantError.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

inline double infidelity(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    return 1.0 - fidelity(rho, sigma);
}

/// (|a0|^2, |a1|^2).
std::pair<double, double> measure_probs(const PureState& state);

}  // namespace pulseforge
