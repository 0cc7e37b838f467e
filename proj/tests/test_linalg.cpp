#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qest/linalg.hpp"
#include "test_util.hpp"

using namespace qest;
using namespace qest::testutil;

namespace {
const Complex I{0.0, 1.0};
}

TEST_CASE("constructors reject bad data") {
    CHECK_THROWS_AS(ComplexMatrix(2, 2, {1.0, 2.0, 3.0}), DimMismatchError);
    CHECK_THROWS_AS(
        ComplexMatrix(1, 2, {Complex{std::numeric_limits<double>::quiet_NaN(), 0.0}, 1.0}),
        BadParameterError);
    CHECK_THROWS_AS(
        ComplexMatrix(1, 1, {Complex{std::numeric_limits<double>::infinity(), 0.0}}),
        BadParameterError);
    CHECK_THROWS_AS(ComplexMatrix::from_rows({{1.0, 2.0}, {3.0}}), DimMismatchError);
}

TEST_CASE("kron identity and scalar cases") {
    const ComplexMatrix a = ComplexMatrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(kron(ComplexMatrix::identity(2), a) == block_diag(a, a));
    CHECK(kron(a, ComplexMatrix::from_rows({{1.0}})) == a);

    const ComplexMatrix x = ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    const ComplexMatrix expected = ComplexMatrix::from_rows({{0.0, 1.0, 0.0, 2.0},
                                                             {1.0, 0.0, 2.0, 0.0},
                                                             {0.0, 3.0, 0.0, 4.0},
                                                             {3.0, 0.0, 4.0, 0.0}});
    CHECK(kron(a, x) == expected);
}

TEST_CASE("kron mixed-product property") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix a = random_matrix(rng, 2, 3);
        const ComplexMatrix b = random_matrix(rng, 3, 2);
        const ComplexMatrix c = random_matrix(rng, 3, 2);
        const ComplexMatrix d = random_matrix(rng, 2, 3);
        const ComplexMatrix lhs = kron(a, b) * kron(c, d);
        const ComplexMatrix rhs = kron(a * c, b * d);
        CHECK(diff_norm(lhs, rhs) <= 1e-10 * (1.0 + rhs.frobenius_norm()));
    }
}

TEST_CASE("solve_linear basic cases") {
    const ComplexMatrix b = ComplexMatrix::from_rows({{2.0}, {8.0}});
    CHECK(solve_linear(ComplexMatrix::identity(2), b) == b);

    const ComplexMatrix d = ComplexMatrix::diagonal({2.0, 4.0});
    const ComplexMatrix x = solve_linear(d, b);
    CHECK(approx(x, ComplexMatrix::from_rows({{1.0}, {2.0}}), 1e-14));

    const ComplexMatrix rank1 = ComplexMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
    CHECK_THROWS_AS(solve_linear(rank1, b), SingularError);
    CHECK_THROWS_AS(solve_linear(ComplexMatrix::zero(2, 2), b), SingularError);
}

TEST_CASE("solve_linear round-trip recovers X") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + rep % 6;
        ComplexMatrix a = random_matrix(rng, n, n);
        const double boost = a.frobenius_norm() + 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            a(i, i) += boost; // keep A comfortably nonsingular
        }
        const ComplexMatrix x = random_matrix(rng, n, 3);
        const ComplexMatrix rec = solve_linear(a, a * x);
        CHECK(diff_norm(rec, x) <= 1e-9 * x.frobenius_norm());
        CHECK((a * rec - a * x).frobenius_norm() <=
              1e-10 * (1.0 + (a * x).frobenius_norm()));
    }
}

TEST_CASE("lyapunov_solve scalar and diagonal cases") {
    const ComplexMatrix x1 =
        lyapunov_solve(ComplexMatrix::from_rows({{-2.0}}), ComplexMatrix::from_rows({{4.0}}));
    CHECK(approx(x1, ComplexMatrix::from_rows({{1.0}}), 1e-13));

    const ComplexMatrix x2 = lyapunov_solve(-ComplexMatrix::identity(2),
                                            2.0 * ComplexMatrix::identity(2));
    CHECK(approx(x2, ComplexMatrix::identity(2), 1e-13));

    CHECK_THROWS_AS(
        lyapunov_solve(ComplexMatrix::zero(1, 1), ComplexMatrix::from_rows({{1.0}})),
        SingularError);
}

TEST_CASE("lyapunov_solve residual bound and exact Hermitian output") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 1 + rep % 5;
        const ComplexMatrix a = random_hurwitz(rng, n);
        const ComplexMatrix q = random_hermitian(rng, n, 2.0);
        const ComplexMatrix x = lyapunov_solve(a, q);
        const double residual = (a * x + x * a.adjoint() + q).frobenius_norm();
        CHECK(residual <= 1e-9 * (1.0 + q.frobenius_norm()));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(x(i, j) == std::conj(x(j, i)));
            }
        }
    }
}

TEST_CASE("is_hurwitz on fixed cases") {
    CHECK(is_hurwitz(ComplexMatrix::diagonal({-1.0, -3.0})));
    CHECK_FALSE(is_hurwitz(ComplexMatrix::from_rows({{1.0}})));
    // characteristic roots -1 and -3
    CHECK(is_hurwitz(ComplexMatrix::from_rows({{-2.0, -1.0}, {-1.0, -2.0}})));
    // eigenvalue on the imaginary axis
    CHECK_FALSE(is_hurwitz(ComplexMatrix::from_rows({{I}})));
}

TEST_CASE("is_hurwitz agrees with the quadratic-formula oracle") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rep % 2;
        const ComplexMatrix a = random_matrix(rng, n, n, 2.0);
        CHECK(is_hurwitz(a) == hurwitz_by_roots(a));
    }
}

TEST_CASE("is_positive_definite") {
    CHECK(is_positive_definite(ComplexMatrix::identity(3)));
    CHECK_FALSE(is_positive_definite(ComplexMatrix::diagonal({1.0, -1.0})));
    CHECK(is_positive_definite(ComplexMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}})));
    CHECK_THROWS_AS(is_positive_definite(ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})),
                    NotHermitianError);
}

TEST_CASE("is_hermitian") {
    CHECK(is_hermitian(ComplexMatrix::identity(2), 0.0));
    CHECK(is_hermitian(ComplexMatrix::from_rows({{0.0, I}, {-I, 0.0}}), 0.0));
    CHECK_FALSE(is_hermitian(ComplexMatrix::from_rows({{0.0, I}, {I, 0.0}}), 1e-9));
    CHECK_FALSE(is_hermitian(ComplexMatrix::zero(1, 2), 1e-9));
}

TEST_CASE("positive semidefinite probe") {
    CHECK(is_positive_semidefinite_within(ComplexMatrix::diagonal({0.0, 4.0}), 1e-8));
    CHECK_FALSE(is_positive_semidefinite_within(ComplexMatrix::diagonal({-1.0, 4.0}), 1e-8));
}
