#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qest/linalg.hpp"

namespace qest {

/// Doubled-form linear quantum system: state [a; a#] of n modes driven by m
/// field channels,
///   d[a; a#] = F [a; a#] dt + G [dA; dA#]
///   [dY; dY#] = H [a; a#] dt + K [dA; dA#]
/// with F, G, H, K each Delta-structured. The optional row C defines the
/// scalar quantity of interest z = C [a; a#].
struct QuantumSystem {
    std::size_t n = 0; ///< mode count
    std::size_t m = 0; ///< field channel count
    ComplexMatrix F;   ///< 2n x 2n
    ComplexMatrix G;   ///< 2n x 2m
    ComplexMatrix H;   ///< 2m x 2n
    ComplexMatrix K;   ///< 2m x 2m
    ComplexMatrix C;   ///< 1 x 2n, empty when absent

    bool has_cost_row() const { return !C.empty(); }

    /// Validates dimensions and Delta structure (within kHermitian) before
    /// constructing. Throws DimMismatchError / BadParameterError.
    static QuantumSystem create(ComplexMatrix F, ComplexMatrix G, ComplexMatrix H,
                                ComplexMatrix K, ComplexMatrix C = {});
};

/// Annihilation-operator-only system: da = F1 a dt + G1 dA,
/// dY = H1 a dt + K1 dA.
struct PassiveSystem {
    std::size_t n = 0;
    std::size_t m = 0;
    ComplexMatrix F1; ///< n x n
    ComplexMatrix G1; ///< n x m
    ComplexMatrix H1; ///< m x n
    ComplexMatrix K1; ///< m x m

    static PassiveSystem create(ComplexMatrix F1, ComplexMatrix G1, ComplexMatrix H1,
                                ComplexMatrix K1);
};

/// Commutation matrix of a system. Passive kind: n x n, Hermitian, positive
/// definite. General kind: 2n x 2n of block form [[T1, T2], [-T2#, -T1#]]
/// with T1 Hermitian and T2 antisymmetric, nonsingular, inertia (n, n).
struct CommutationMatrix {
    enum class Kind { general, passive };
    ComplexMatrix theta;
    Kind kind = Kind::general;

    /// Validating factories; throw NotHermitianError / NotPositiveDefiniteError /
    /// BadParameterError when the invariants fail.
    static CommutationMatrix general(ComplexMatrix theta);
    static CommutationMatrix passive(ComplexMatrix theta);
};

/// Hamiltonian matrix M = M' and coupling matrix N of an open harmonic
/// oscillator. General kind carries Delta-structured 2n-dimensional M, N;
/// passive kind carries an n-dimensional Hermitian M.
struct HamiltonianCoupling {
    enum class Kind { general, passive };
    ComplexMatrix M;
    ComplexMatrix N;
    Kind kind = Kind::general;

    static HamiltonianCoupling general(ComplexMatrix M, ComplexMatrix N);
    static HamiltonianCoupling passive(ComplexMatrix M, ComplexMatrix N);
};

/// The 2x2 block matrix [[A1, A2], [conj(A2), conj(A1)]].
ComplexMatrix delta_embed(const ComplexMatrix& a1, const ComplexMatrix& a2);

/// True iff the bottom blocks mirror the top ones under conjugation, within
/// tol * (1 + ||A||_F). Throws OddDimensionError on odd dimensions.
bool is_delta_structured(const ComplexMatrix& a, double tol);

/// diag(I_k, -I_k), the signature matrix of the doubled form.
ComplexMatrix signature_matrix(std::size_t k);

/// Doubles an annihilation-only system into block-diagonal form
/// F = diag(F1, F1#), etc. An optional cost row of width n is zero-padded
/// to [C1 0]; width 2n is used as-is.
QuantumSystem lift_passive(const PassiveSystem& sys, const ComplexMatrix& c1 = {});

/// Dynamic squeezer with damping gamma, couplings kappa_i and squeezing
/// parameter chi (chi = 0 reduces to a passive cavity). With `enforce` set,
/// gamma must equal the sum of the kappas, the condition for physical
/// realizability of this family.
QuantumSystem make_squeezer(double gamma, const std::vector<double>& kappas, Complex chi,
                            bool enforce);

/// Builds the doubled-form system F = -i Theta M - 1/2 Theta N' J N,
/// G = -Theta N' J, H = N, K = I from general-kind data. The result always
/// satisfies the general realizability conditions with the same Theta.
QuantumSystem realize_general(const HamiltonianCoupling& hc, const CommutationMatrix& theta);

/// Builds F1 = Theta (-i M - 1/2 N' N), G1 = -Theta N', H1 = N, K1 = I.
PassiveSystem realize_passive(const ComplexMatrix& M, const ComplexMatrix& N,
                              const ComplexMatrix& theta1);

/// Outcome of a realizability check. `theta` holds the recovered candidate
/// whenever the Lyapunov step had a unique solution. When the inertia step
/// had to be skipped (vanishing leading minor) `structural_check_only` is
/// set, mirroring the necessary-conditions-only nature of the structure
/// test.
struct RealizabilityReport {
    enum class Condition { none, commutation, coupling, scattering };

    bool realizable = false;
    bool inconclusive = false; ///< Lyapunov operator singular: no unique Theta
    bool structural_check_only = false;
    ComplexMatrix theta;
    Condition failed = Condition::none;
    double commutation_residual = 0.0; ///< structure deviation of the candidate
    double coupling_residual = 0.0;    ///< ||G + Theta H' J|| (passive: ||G1 + Theta1 H1'||)
    double scattering_residual = 0.0;  ///< ||K - I||
    std::string detail;
};

const char* to_string(RealizabilityReport::Condition c);

/// Doubled-form check: recover Theta from F Theta + Theta F' + G J G' = 0,
/// then require the commutation-matrix invariants, G = -Theta H' J and K = I,
/// all within kRealizability.
RealizabilityReport check_realizable_general(const QuantumSystem& sys);

/// Annihilation-only check: Theta1 from F1 Theta1 + Theta1 F1' + G1 G1' = 0,
/// then Theta1 > 0, G1 = -Theta1 H1' and K1 = I.
RealizabilityReport check_realizable_passive(const PassiveSystem& sys);

/// Draw callback used by the generators: fills M and N for the requested
/// sizes. Exposed so the rejection loop is testable with pinned draws.
using MatrixDraw = std::function<void(ComplexMatrix& M, ComplexMatrix& N)>;

/// Seeded generator of physically realizable systems: Hermitian M and
/// coupling N with uniform [-1, 1] real and imaginary parts, Theta = J
/// (general) or I (passive), redrawn until F is Hurwitz. Deterministic in
/// the seed. Throws RejectionExhaustedError after 100 rejected draws.
QuantumSystem random_realizable_general(std::uint64_t seed, std::size_t n, std::size_t m);
PassiveSystem random_realizable_passive(std::uint64_t seed, std::size_t n, std::size_t m);

/// Rejection-loop cores with injectable draws.
QuantumSystem random_realizable_general_with(const MatrixDraw& draw, std::size_t n,
                                             std::size_t m);
PassiveSystem random_realizable_passive_with(const MatrixDraw& draw, std::size_t n,
                                             std::size_t m);

} // namespace qest
