#include "qest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace qest {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimMismatchError(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                               "x" + std::to_string(b.cols()) + " differ");
    }
}

bool all_finite(const std::vector<Complex>& data) {
    return std::all_of(data.begin(), data.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimMismatchError("ComplexMatrix: data length " + std::to_string(data_.size()) +
                               " does not match " + std::to_string(rows_) + "x" +
                               std::to_string(cols_));
    }
    if (!all_finite(data_)) {
        throw BadParameterError("ComplexMatrix: non-finite entry");
    }
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
    std::vector<Complex> data;
    data.reserve(nr * nc);
    for (const auto& row : rows) {
        if (row.size() != nc) {
            throw DimMismatchError("from_rows: ragged row");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return {nr, nc, std::move(data)};
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix c = *this;
    for (auto& z : c.data_) {
        z = std::conj(z);
    }
    return c;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = std::conj((*this)(i, j));
        }
    }
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                                   std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
        throw DimMismatchError("block: out of range");
    }
    ComplexMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            b(i, j) = (*this)(r0 + i, c0 + j);
        }
    }
    return b;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
        throw DimMismatchError("set_block: out of range");
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            (*this)(r0 + i, c0 + j) = b(i, j);
        }
    }
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += rhs.data_[k];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= rhs.data_[k];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& z : data_) {
        z *= s;
    }
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
}

ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
}

ComplexMatrix operator-(const ComplexMatrix& a) {
    ComplexMatrix r = a;
    r *= Complex{-1.0, 0.0};
    return r;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimMismatchError("operator*: inner dimensions " + std::to_string(a.cols()) +
                               " and " + std::to_string(b.rows()) + " differ");
    }
    ComplexMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                r(i, j) += aik * b(k, j);
            }
        }
    }
    return r;
}

ComplexMatrix operator*(Complex s, ComplexMatrix a) {
    a *= s;
    return a;
}

ComplexMatrix operator*(ComplexMatrix a, Complex s) {
    a *= s;
    return a;
}

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) {
        throw DimMismatchError("hstack: row counts differ");
    }
    ComplexMatrix r(a.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(0, a.cols(), b);
    return r;
}

ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.cols()) {
        throw DimMismatchError("vstack: column counts differ");
    }
    ComplexMatrix r(a.rows() + b.rows(), a.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), 0, b);
    return r;
}

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), a.cols(), b);
    return r;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{0.0, 0.0}) {
                continue;
            }
            for (std::size_t p = 0; p < b.rows(); ++p) {
                for (std::size_t q = 0; q < b.cols(); ++q) {
                    r(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
                }
            }
        }
    }
    return r;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.square()) {
        throw DimMismatchError("solve_linear: A must be square");
    }
    if (a.rows() != b.rows()) {
        throw DimMismatchError("solve_linear: A and B row counts differ");
    }
    const std::size_t n = a.rows();
    const double scale = a.max_abs();
    const double pivot_floor = tolerance::kPivotRel * scale;
    if (scale == 0.0) {
        throw SingularError("solve_linear: zero matrix");
    }

    ComplexMatrix lu = a;
    ComplexMatrix x = b;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(lu(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(lu(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < pivot_floor) {
            throw SingularError("solve_linear: pivot " + std::to_string(best) +
                                " below threshold at column " + std::to_string(col));
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(lu(col, j), lu(piv, j));
            }
            for (std::size_t j = 0; j < x.cols(); ++j) {
                std::swap(x(col, j), x(piv, j));
            }
        }
        const Complex d = lu(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = lu(r, col) / d;
            if (f == Complex{0.0, 0.0}) {
                continue;
            }
            lu(r, col) = f;
            for (std::size_t j = col + 1; j < n; ++j) {
                lu(r, j) -= f * lu(col, j);
            }
            for (std::size_t j = 0; j < x.cols(); ++j) {
                x(r, j) -= f * x(col, j);
            }
        }
    }
    // back substitution
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            Complex s = x(col, j);
            for (std::size_t k = col + 1; k < n; ++k) {
                s -= lu(col, k) * x(k, j);
            }
            x(col, j) = s / lu(col, col);
        }
    }
    return x;
}

ComplexMatrix lyapunov_solve(const ComplexMatrix& a, const ComplexMatrix& q) {
    if (!a.square() || !q.square() || a.rows() != q.rows()) {
        throw DimMismatchError("lyapunov_solve: A and Q must be square of equal size");
    }
    if (!is_hermitian(q, tolerance::kHermitian)) {
        throw NotHermitianError("lyapunov_solve: Q is not Hermitian");
    }
    const std::size_t n = a.rows();
    const ComplexMatrix qh = Complex{0.5, 0.0} * (q + q.adjoint());

    // column-stacking vec: AX -> (I (x) A) vec X, X A' -> (conj(A) (x) I) vec X
    const ComplexMatrix eye = ComplexMatrix::identity(n);
    const ComplexMatrix op = kron(eye, a) + kron(a.conjugate(), eye);

    ComplexMatrix rhs(n * n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            rhs(j * n + i, 0) = -qh(i, j);
        }
    }

    ComplexMatrix v;
    try {
        v = solve_linear(op, rhs);
    } catch (const SingularError&) {
        throw SingularError("lyapunov_solve: A has eigenvalues mirrored across the imaginary "
                            "axis; no unique solution");
    }

    ComplexMatrix x(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            x(i, j) = v(j * n + i, 0);
        }
    }
    return Complex{0.5, 0.0} * (x + x.adjoint());
}

bool is_hurwitz(const ComplexMatrix& a) {
    if (!a.square()) {
        throw DimMismatchError("is_hurwitz: A must be square");
    }
    ComplexMatrix x;
    try {
        x = lyapunov_solve(a, ComplexMatrix::identity(a.rows()));
    } catch (const SingularError&) {
        return false; // eigenvalue pair summing to zero: not strictly stable
    }
    const auto l = cholesky_factor(x);
    if (!l) {
        return false;
    }
    double min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < l->rows(); ++i) {
        min_diag = std::min(min_diag, (*l)(i, i).real());
    }
    return min_diag > tolerance::kCholeskyPivot;
}

bool is_positive_definite(const ComplexMatrix& a) {
    if (!is_hermitian(a, tolerance::kHermitian)) {
        throw NotHermitianError("is_positive_definite: Hermitian deviation exceeds tolerance");
    }
    return cholesky_factor(a).has_value();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (!a.square()) {
        return false;
    }
    return (a - a.adjoint()).frobenius_norm() <= tol * (1.0 + a.frobenius_norm());
}

std::optional<ComplexMatrix> cholesky_factor(const ComplexMatrix& a, double pivot_floor) {
    if (!a.square()) {
        return std::nullopt;
    }
    const std::size_t n = a.rows();
    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) {
            d -= std::norm(l(j, k));
        }
        if (!(d > pivot_floor * pivot_floor)) {
            return std::nullopt;
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = s / ljj;
        }
    }
    return l;
}

bool is_positive_semidefinite_within(const ComplexMatrix& a, double slack) {
    if (!a.square()) {
        return false;
    }
    const double shift = slack * (1.0 + a.frobenius_norm());
    ComplexMatrix shifted = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        shifted(i, i) += shift;
    }
    // the shift dominates the pivot floor, so probe with a tiny floor
    return cholesky_factor(shifted, 0.0).has_value();
}

} // namespace qest
