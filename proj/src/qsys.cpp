#include "qest/qsys.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <utility>

namespace qest {

namespace {

constexpr int kMaxGeneratorDraws = 100;

std::string shape_str(const ComplexMatrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_shape(const ComplexMatrix& a, std::size_t r, std::size_t c, const char* name) {
    if (a.rows() != r || a.cols() != c) {
        throw DimMismatchError(std::string(name) + ": expected " + std::to_string(r) + "x" +
                               std::to_string(c) + ", got " + shape_str(a));
    }
}

/// Outcome of the structural commutation-matrix test (necessary conditions
/// for Theta = T J T' with Delta-structured nonsingular T).
struct StructureCheck {
    bool ok = false;
    bool inertia_skipped = false;
    double residual = 0.0;
    std::string detail;
};

/// Determinant of the leading k x k block via LU with partial pivoting.
/// Returns nullopt when a pivot collapses (minor numerically zero).
std::optional<Complex> leading_minor_det(const ComplexMatrix& a, std::size_t k) {
    ComplexMatrix lu = a.block(0, 0, k, k);
    const double floor = tolerance::kPivotRel * (1.0 + lu.max_abs());
    Complex det{1.0, 0.0};
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        double best = std::abs(lu(col, col));
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::abs(lu(r, col)) > best) {
                best = std::abs(lu(r, col));
                piv = r;
            }
        }
        if (best < floor) {
            return std::nullopt;
        }
        if (piv != col) {
            for (std::size_t j = 0; j < k; ++j) {
                std::swap(lu(col, j), lu(piv, j));
            }
            det = -det;
        }
        det *= lu(col, col);
        for (std::size_t r = col + 1; r < k; ++r) {
            const Complex f = lu(r, col) / lu(col, col);
            for (std::size_t j = col + 1; j < k; ++j) {
                lu(r, j) -= f * lu(col, j);
            }
        }
    }
    return det;
}

/// Jacobi sign-rule inertia count: for a Hermitian nonsingular matrix whose
/// leading principal minors are all nonzero, the number of negative
/// eigenvalues equals the sign changes in 1, D1, ..., Dn.
StructureCheck check_general_structure(const ComplexMatrix& theta) {
    StructureCheck out;
    if (!theta.square() || theta.rows() % 2 != 0 || theta.rows() == 0) {
        out.detail = "theta must be square with even dimension";
        return out;
    }
    const std::size_t n = theta.rows() / 2;
    const double scale = 1.0 + theta.frobenius_norm();
    const double tol = tolerance::kRealizability * scale;

    const double herm_dev = (theta - theta.adjoint()).frobenius_norm();
    const ComplexMatrix t1 = theta.block(0, 0, n, n);
    const ComplexMatrix t2 = theta.block(0, n, n, n);
    const ComplexMatrix bl = theta.block(n, 0, n, n);
    const ComplexMatrix br = theta.block(n, n, n, n);

    const double t1_dev = (t1 - t1.adjoint()).frobenius_norm();
    const double t2_dev = (t2 + t2.transpose()).frobenius_norm();
    const double bl_dev = (bl + t2.conjugate()).frobenius_norm();
    const double br_dev = (br + t1.conjugate()).frobenius_norm();
    out.residual = std::sqrt(herm_dev * herm_dev + t1_dev * t1_dev + t2_dev * t2_dev +
                             bl_dev * bl_dev + br_dev * br_dev);
    if (out.residual > tol) {
        out.detail = "theta lacks the [[T1, T2], [-T2#, -T1#]] block form";
        return out;
    }

    // nonsingularity
    try {
        solve_linear(theta, ComplexMatrix::identity(2 * n));
    } catch (const SingularError&) {
        out.detail = "theta is singular";
        return out;
    }

    // inertia must be (n, n); skip when a leading minor vanishes
    int sign_changes = 0;
    double prev = 1.0;
    for (std::size_t k = 1; k <= 2 * n; ++k) {
        const auto det = leading_minor_det(theta, k);
        if (!det) {
            out.inertia_skipped = true;
            break;
        }
        const double d = det->real(); // Hermitian: minors are real
        const double minor_floor = 1e-10 * std::pow(std::max(1.0, theta.max_abs()), double(k));
        if (std::abs(d) <= minor_floor || std::abs(det->imag()) > minor_floor) {
            out.inertia_skipped = true;
            break;
        }
        if ((d < 0.0) != (prev < 0.0)) {
            ++sign_changes;
        }
        prev = d;
    }
    if (!out.inertia_skipped && sign_changes != static_cast<int>(n)) {
        out.detail = "theta inertia is not (" + std::to_string(n) + ", " + std::to_string(n) +
                     "): " + std::to_string(sign_changes) + " negative eigenvalue(s)";
        return out;
    }
    if (out.inertia_skipped) {
        out.detail = "inertia not certified (vanishing leading minor); structural check only";
    }
    out.ok = true;
    return out;
}

double uniform_pm1(std::mt19937_64& rng) {
    // top 53 bits -> [0, 1), mapped to [-1, 1); bit-exact across platforms
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

ComplexMatrix draw_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    ComplexMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double re = uniform_pm1(rng);
            const double im = uniform_pm1(rng);
            a(i, j) = Complex{re, im};
        }
    }
    return a;
}

} // namespace

QuantumSystem QuantumSystem::create(ComplexMatrix F, ComplexMatrix G, ComplexMatrix H,
                                    ComplexMatrix K, ComplexMatrix C) {
    if (!F.square() || F.rows() == 0 || F.rows() % 2 != 0) {
        throw BadParameterError("QuantumSystem: F must be square 2n x 2n with n >= 1");
    }
    const std::size_t n = F.rows() / 2;
    if (G.rows() != 2 * n || G.cols() == 0 || G.cols() % 2 != 0) {
        throw DimMismatchError("QuantumSystem: G must be 2n x 2m with m >= 1, got " +
                               shape_str(G));
    }
    const std::size_t m = G.cols() / 2;
    require_shape(H, 2 * m, 2 * n, "QuantumSystem: H");
    require_shape(K, 2 * m, 2 * m, "QuantumSystem: K");
    const struct { const ComplexMatrix* mat; const char* name; } parts[] = {
        {&F, "F"}, {&G, "G"}, {&H, "H"}, {&K, "K"}};
    for (const auto& p : parts) {
        if (!is_delta_structured(*p.mat, tolerance::kHermitian)) {
            throw BadParameterError(std::string("QuantumSystem: ") + p.name +
                                    " is not Delta-structured");
        }
    }
    if (!C.empty()) {
        require_shape(C, 1, 2 * n, "QuantumSystem: C");
    }
    return {n, m, std::move(F), std::move(G), std::move(H), std::move(K), std::move(C)};
}

PassiveSystem PassiveSystem::create(ComplexMatrix F1, ComplexMatrix G1, ComplexMatrix H1,
                                    ComplexMatrix K1) {
    if (!F1.square() || F1.rows() == 0) {
        throw BadParameterError("PassiveSystem: F1 must be square n x n with n >= 1");
    }
    const std::size_t n = F1.rows();
    if (G1.rows() != n || G1.cols() == 0) {
        throw DimMismatchError("PassiveSystem: G1 must be n x m with m >= 1, got " +
                               shape_str(G1));
    }
    const std::size_t m = G1.cols();
    require_shape(H1, m, n, "PassiveSystem: H1");
    require_shape(K1, m, m, "PassiveSystem: K1");
    return {n, m, std::move(F1), std::move(G1), std::move(H1), std::move(K1)};
}

CommutationMatrix CommutationMatrix::general(ComplexMatrix theta) {
    const auto chk = check_general_structure(theta);
    if (!chk.ok) {
        throw BadParameterError("CommutationMatrix::general: " + chk.detail);
    }
    return {std::move(theta), Kind::general};
}

CommutationMatrix CommutationMatrix::passive(ComplexMatrix theta) {
    if (!is_hermitian(theta, tolerance::kHermitian)) {
        throw NotHermitianError("CommutationMatrix::passive: theta is not Hermitian");
    }
    if (!is_positive_definite(theta)) {
        throw NotPositiveDefiniteError("CommutationMatrix::passive: theta is not positive "
                                       "definite");
    }
    return {std::move(theta), Kind::passive};
}

HamiltonianCoupling HamiltonianCoupling::general(ComplexMatrix M, ComplexMatrix N) {
    if (!is_hermitian(M, tolerance::kHermitian)) {
        throw NotHermitianError("HamiltonianCoupling: M is not Hermitian");
    }
    if (!is_delta_structured(M, tolerance::kHermitian) ||
        !is_delta_structured(N, tolerance::kHermitian)) {
        throw BadParameterError("HamiltonianCoupling: M and N must be Delta-structured");
    }
    if (N.cols() != M.rows()) {
        throw DimMismatchError("HamiltonianCoupling: N column count must match M");
    }
    return {std::move(M), std::move(N), Kind::general};
}

HamiltonianCoupling HamiltonianCoupling::passive(ComplexMatrix M, ComplexMatrix N) {
    if (!is_hermitian(M, tolerance::kHermitian)) {
        throw NotHermitianError("HamiltonianCoupling: M is not Hermitian");
    }
    if (N.cols() != M.rows()) {
        throw DimMismatchError("HamiltonianCoupling: N column count must match M");
    }
    return {std::move(M), std::move(N), Kind::passive};
}

ComplexMatrix delta_embed(const ComplexMatrix& a1, const ComplexMatrix& a2) {
    if (a1.rows() != a2.rows() || a1.cols() != a2.cols()) {
        throw DimMismatchError("delta_embed: blocks must have equal shape");
    }
    ComplexMatrix r(2 * a1.rows(), 2 * a1.cols());
    r.set_block(0, 0, a1);
    r.set_block(0, a1.cols(), a2);
    r.set_block(a1.rows(), 0, a2.conjugate());
    r.set_block(a1.rows(), a1.cols(), a1.conjugate());
    return r;
}

bool is_delta_structured(const ComplexMatrix& a, double tol) {
    if (a.rows() % 2 != 0 || a.cols() % 2 != 0) {
        throw OddDimensionError("is_delta_structured: dimensions must be even");
    }
    const std::size_t r = a.rows() / 2;
    const std::size_t c = a.cols() / 2;
    const ComplexMatrix tl = a.block(0, 0, r, c);
    const ComplexMatrix tr = a.block(0, c, r, c);
    const ComplexMatrix bl = a.block(r, 0, r, c);
    const ComplexMatrix br = a.block(r, c, r, c);
    const double d1 = (bl - tr.conjugate()).frobenius_norm();
    const double d2 = (br - tl.conjugate()).frobenius_norm();
    return std::sqrt(d1 * d1 + d2 * d2) <= tol * (1.0 + a.frobenius_norm());
}

ComplexMatrix signature_matrix(std::size_t k) {
    ComplexMatrix j(2 * k, 2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        j(i, i) = 1.0;
        j(k + i, k + i) = -1.0;
    }
    return j;
}

QuantumSystem lift_passive(const PassiveSystem& sys, const ComplexMatrix& c1) {
    ComplexMatrix c;
    if (!c1.empty()) {
        if (c1.rows() != 1) {
            throw DimMismatchError("lift_passive: cost row must be 1 x n or 1 x 2n");
        }
        if (c1.cols() == sys.n) {
            c = hstack(c1, ComplexMatrix::zero(1, sys.n));
        } else if (c1.cols() == 2 * sys.n) {
            c = c1;
        } else {
            throw DimMismatchError("lift_passive: cost row must be 1 x n or 1 x 2n");
        }
    }
    return QuantumSystem::create(block_diag(sys.F1, sys.F1.conjugate()),
                                 block_diag(sys.G1, sys.G1.conjugate()),
                                 block_diag(sys.H1, sys.H1.conjugate()),
                                 block_diag(sys.K1, sys.K1.conjugate()), std::move(c));
}

QuantumSystem make_squeezer(double gamma, const std::vector<double>& kappas, Complex chi,
                            bool enforce) {
    if (!(gamma > 0.0)) {
        throw BadParameterError("make_squeezer: gamma must be positive");
    }
    if (kappas.empty()) {
        throw BadParameterError("make_squeezer: at least one coupling kappa is required");
    }
    double kappa_sum = 0.0;
    for (double k : kappas) {
        if (!(k > 0.0)) {
            throw BadParameterError("make_squeezer: kappas must be positive");
        }
        kappa_sum += k;
    }
    if (enforce && std::abs(gamma - kappa_sum) > 1e-9) {
        std::ostringstream oss;
        oss << "make_squeezer: not physically realizable: gamma = " << gamma
            << " != sum(kappa) = " << kappa_sum;
        throw NotRealizableError(oss.str());
    }

    const std::size_t m = kappas.size();
    ComplexMatrix f1(1, 1);
    f1(0, 0) = Complex{-gamma / 2.0, 0.0};
    ComplexMatrix f2(1, 1);
    f2(0, 0) = -chi;

    ComplexMatrix g1(1, m);
    ComplexMatrix h1(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double root = std::sqrt(kappas[i]);
        g1(0, i) = Complex{-root, 0.0};
        h1(i, 0) = Complex{root, 0.0};
    }

    return QuantumSystem::create(delta_embed(f1, f2), delta_embed(g1, ComplexMatrix::zero(1, m)),
                                 delta_embed(h1, ComplexMatrix::zero(m, 1)),
                                 ComplexMatrix::identity(2 * m));
}

QuantumSystem realize_general(const HamiltonianCoupling& hc, const CommutationMatrix& theta) {
    if (hc.kind != HamiltonianCoupling::Kind::general ||
        theta.kind != CommutationMatrix::Kind::general) {
        throw BadParameterError("realize_general: general-kind inputs required");
    }
    const ComplexMatrix& M = hc.M;
    const ComplexMatrix& N = hc.N;
    const ComplexMatrix& T = theta.theta;
    if (T.rows() != M.rows() || N.cols() != M.rows()) {
        throw DimMismatchError("realize_general: dimension mismatch between M, N, theta");
    }
    const std::size_t m = N.rows() / 2;
    const ComplexMatrix J = signature_matrix(m);
    const ComplexMatrix Nadj = N.adjoint();

    const ComplexMatrix F =
        Complex{0.0, -1.0} * (T * M) - Complex{0.5, 0.0} * (T * (Nadj * (J * N)));
    const ComplexMatrix G = -(T * (Nadj * J));
    return QuantumSystem::create(F, G, N, ComplexMatrix::identity(2 * m));
}

PassiveSystem realize_passive(const ComplexMatrix& M, const ComplexMatrix& N,
                              const ComplexMatrix& theta1) {
    if (!is_hermitian(M, tolerance::kHermitian)) {
        throw NotHermitianError("realize_passive: M is not Hermitian");
    }
    if (!is_hermitian(theta1, tolerance::kHermitian) || !is_positive_definite(theta1)) {
        throw NotPositiveDefiniteError("realize_passive: theta1 is not positive definite");
    }
    if (N.cols() != M.rows() || theta1.rows() != M.rows()) {
        throw DimMismatchError("realize_passive: dimension mismatch between M, N, theta1");
    }
    const std::size_t m = N.rows();
    const ComplexMatrix F1 =
        theta1 * (Complex{0.0, -1.0} * M - Complex{0.5, 0.0} * (N.adjoint() * N));
    const ComplexMatrix G1 = -(theta1 * N.adjoint());
    return PassiveSystem::create(F1, G1, N, ComplexMatrix::identity(m));
}

const char* to_string(RealizabilityReport::Condition c) {
    switch (c) {
    case RealizabilityReport::Condition::none:
        return "none";
    case RealizabilityReport::Condition::commutation:
        return "commutation matrix structure";
    case RealizabilityReport::Condition::coupling:
        return "coupling G = -Theta H' J";
    case RealizabilityReport::Condition::scattering:
        return "scattering K = I";
    }
    return "unknown";
}

RealizabilityReport check_realizable_general(const QuantumSystem& sys) {
    RealizabilityReport rep;
    const ComplexMatrix J = signature_matrix(sys.m);
    const ComplexMatrix Q = sys.G * J * sys.G.adjoint();

    try {
        rep.theta = lyapunov_solve(sys.F, Q);
    } catch (const SingularError&) {
        rep.inconclusive = true;
        rep.detail = "F has mirrored eigenvalues: commutation matrix not unique, check "
                     "inconclusive";
        return rep;
    }

    const auto structure = check_general_structure(rep.theta);
    rep.commutation_residual = structure.residual;
    rep.structural_check_only = structure.inertia_skipped;

    rep.coupling_residual = (sys.G + rep.theta * sys.H.adjoint() * J).frobenius_norm();
    const bool coupling_ok =
        rep.coupling_residual <= tolerance::kRealizability * (1.0 + sys.G.frobenius_norm());

    rep.scattering_residual = (sys.K - ComplexMatrix::identity(sys.K.rows())).frobenius_norm();
    const bool scattering_ok = rep.scattering_residual <= tolerance::kRealizability;

    if (!structure.ok) {
        rep.failed = RealizabilityReport::Condition::commutation;
        rep.detail = structure.detail;
    } else if (!coupling_ok) {
        rep.failed = RealizabilityReport::Condition::coupling;
        rep.detail = "coupling residual exceeds tolerance";
    } else if (!scattering_ok) {
        rep.failed = RealizabilityReport::Condition::scattering;
        rep.detail = "scattering matrix differs from identity";
    } else {
        rep.realizable = true;
        if (structure.inertia_skipped) {
            rep.detail = structure.detail;
        }
    }
    return rep;
}

RealizabilityReport check_realizable_passive(const PassiveSystem& sys) {
    RealizabilityReport rep;
    const ComplexMatrix Q = sys.G1 * sys.G1.adjoint();

    try {
        rep.theta = lyapunov_solve(sys.F1, Q);
    } catch (const SingularError&) {
        rep.inconclusive = true;
        rep.detail = "F1 has mirrored eigenvalues: commutation matrix not unique, check "
                     "inconclusive";
        return rep;
    }

    const bool theta_pd = is_positive_definite(rep.theta);

    rep.coupling_residual = (sys.G1 + rep.theta * sys.H1.adjoint()).frobenius_norm();
    const bool coupling_ok =
        rep.coupling_residual <= tolerance::kRealizability * (1.0 + sys.G1.frobenius_norm());

    rep.scattering_residual = (sys.K1 - ComplexMatrix::identity(sys.m)).frobenius_norm();
    const bool scattering_ok = rep.scattering_residual <= tolerance::kRealizability;

    if (!theta_pd) {
        rep.failed = RealizabilityReport::Condition::commutation;
        rep.detail = "recovered theta is not positive definite";
    } else if (!coupling_ok) {
        rep.failed = RealizabilityReport::Condition::coupling;
        rep.detail = "coupling residual exceeds tolerance";
    } else if (!scattering_ok) {
        rep.failed = RealizabilityReport::Condition::scattering;
        rep.detail = "scattering matrix differs from identity";
    } else {
        rep.realizable = true;
    }
    return rep;
}

QuantumSystem random_realizable_general_with(const MatrixDraw& draw, std::size_t n,
                                             std::size_t m) {
    if (n == 0 || m == 0) {
        throw BadParameterError("random_realizable: n and m must be >= 1");
    }
    const CommutationMatrix theta = CommutationMatrix::general(signature_matrix(n));
    for (int attempt = 0; attempt < kMaxGeneratorDraws; ++attempt) {
        ComplexMatrix M(2 * n, 2 * n);
        ComplexMatrix N(2 * m, 2 * n);
        draw(M, N);
        QuantumSystem sys = realize_general(HamiltonianCoupling::general(M, N), theta);
        if (is_hurwitz(sys.F)) {
            return sys;
        }
    }
    throw RejectionExhaustedError("random_realizable_general: no Hurwitz F in " +
                                  std::to_string(kMaxGeneratorDraws) + " draws");
}

PassiveSystem random_realizable_passive_with(const MatrixDraw& draw, std::size_t n,
                                             std::size_t m) {
    if (n == 0 || m == 0) {
        throw BadParameterError("random_realizable: n and m must be >= 1");
    }
    const ComplexMatrix theta1 = ComplexMatrix::identity(n);
    for (int attempt = 0; attempt < kMaxGeneratorDraws; ++attempt) {
        ComplexMatrix M(n, n);
        ComplexMatrix N(m, n);
        draw(M, N);
        PassiveSystem sys = realize_passive(M, N, theta1);
        if (is_hurwitz(sys.F1)) {
            return sys;
        }
    }
    throw RejectionExhaustedError("random_realizable_passive: no Hurwitz F1 in " +
                                  std::to_string(kMaxGeneratorDraws) + " draws");
}

QuantumSystem random_realizable_general(std::uint64_t seed, std::size_t n, std::size_t m) {
    std::mt19937_64 rng(seed);
    const MatrixDraw draw = [&rng, n, m](ComplexMatrix& M, ComplexMatrix& N) {
        const ComplexMatrix z1 = draw_matrix(rng, n, n);
        const ComplexMatrix m1 = Complex{0.5, 0.0} * (z1 + z1.adjoint());
        const ComplexMatrix z2 = draw_matrix(rng, n, n);
        const ComplexMatrix m2 = Complex{0.5, 0.0} * (z2 + z2.transpose());
        M = delta_embed(m1, m2);
        N = delta_embed(draw_matrix(rng, m, n), draw_matrix(rng, m, n));
    };
    return random_realizable_general_with(draw, n, m);
}

PassiveSystem random_realizable_passive(std::uint64_t seed, std::size_t n, std::size_t m) {
    std::mt19937_64 rng(seed);
    const MatrixDraw draw = [&rng, n, m](ComplexMatrix& M, ComplexMatrix& N) {
        const ComplexMatrix z = draw_matrix(rng, n, n);
        M = Complex{0.5, 0.0} * (z + z.adjoint());
        N = draw_matrix(rng, m, n);
    };
    return random_realizable_passive_with(draw, n, m);
}

} // namespace qest
