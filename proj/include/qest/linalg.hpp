#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

#include "qest/errors.hpp"

namespace qest {

using Complex = std::complex<double>;

/// Numerical thresholds used across the library. All residual checks are
/// relative with an additive 1 guard, tol * (1 + ||.||_F), so they behave
/// sanely near zero matrices.
namespace tolerance {
/// LU pivot rejection threshold, relative to the largest initial entry
/// (~100x double epsilon, scaled).
inline constexpr double kPivotRel = 1e-12;
/// Cholesky pivot square-root floor; below this the factorization is
/// treated as not positive definite.
inline constexpr double kCholeskyPivot = 1e-10;
/// Default Hermitian-deviation tolerance.
inline constexpr double kHermitian = 1e-9;
/// Residual bound contract for lyapunov_solve.
inline constexpr double kLyapunovResidual = 1e-9;
/// Residual bound for physical-realizability conditions (looser than the
/// solver bounds to absorb accumulation through G J G' products).
inline constexpr double kRealizability = 1e-8;
} // namespace tolerance

/// Dense complex matrix in row-major order. The universal numeric carrier
/// for every system matrix in this library; sized for desk-scale problems
/// (dimensions <= ~16), no attempt at large-scale performance.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    /// rows x cols zero matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);

    /// Row-major data constructor. Rejects non-finite entries.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

    /// Builds from nested row lists. Rejects ragged rows and non-finite
    /// entries.
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static ComplexMatrix identity(std::size_t n);
    /// diag(d0, d1, ...) square matrix.
    static ComplexMatrix diagonal(const std::vector<Complex>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<Complex>& data() const { return data_; }

    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    /// Conjugate transpose.
    ComplexMatrix adjoint() const;

    double frobenius_norm() const;
    double max_abs() const;

    /// Copies the nr x nc block with top-left corner (r0, c0).
    ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    /// Writes `b` into this matrix with top-left corner (r0, c0).
    void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex s);

    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);

/// [A B] side by side.
ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b);
/// [A; B] stacked.
ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b);
/// diag(A, B) block-diagonal.
ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product, (rA*rB) x (cA*cB).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Solves A X = B by LU with partial pivoting. Throws SingularError when a
/// pivot falls below kPivotRel times the largest initial entry of A.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

/// Solves A X + X A' + Q = 0 for Hermitian X by Kronecker vectorization,
/// (I (x) A + conj(A) (x) I) vec(X) = -vec(Q), followed by explicit
/// Hermitian symmetrization. Throws SingularError when A has eigenvalues
/// mirrored across the imaginary axis (no unique solution).
ComplexMatrix lyapunov_solve(const ComplexMatrix& a, const ComplexMatrix& q);

/// True iff every eigenvalue of A has negative real part. Eigensolver-free:
/// A is Hurwitz iff lyapunov_solve(A, I) succeeds with a positive-definite
/// solution.
bool is_hurwitz(const ComplexMatrix& a);

/// Cholesky test with pivot floor kCholeskyPivot. Throws NotHermitianError
/// when the Hermitian deviation exceeds kHermitian.
bool is_positive_definite(const ComplexMatrix& a);

/// ||A - A'||_F <= tol * (1 + ||A||_F). Non-square inputs are never
/// Hermitian.
bool is_hermitian(const ComplexMatrix& a, double tol);

/// Lower Cholesky factor of a Hermitian matrix, or nullopt when a pivot
/// square-root falls at or below `pivot_floor`. The strict upper triangle
/// of the input is ignored.
std::optional<ComplexMatrix> cholesky_factor(const ComplexMatrix& a,
                                             double pivot_floor = tolerance::kCholeskyPivot);

/// PSD probe: Cholesky succeeds on A + slack*(1 + ||A||_F)*I.
bool is_positive_semidefinite_within(const ComplexMatrix& a, double slack);

} // namespace qest
