#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "qest/estimation.hpp"
#include "qest/linalg.hpp"

namespace qest {

/// Solver knobs for solve_filter_care.
struct SolveOptions {
    /// Relative residual target: stop when the Riccati residual falls below
    /// tol * (1 + ||Q||_F).
    double tol = 1e-10;
    std::size_t max_iter = 100;
    /// Gain in original coordinates making A - gain * Cmeas Hurwitz; needed
    /// only when A itself is not Hurwitz.
    std::optional<ComplexMatrix> initial_gain;
    /// Observation hook invoked with every Newton iterate.
    std::function<void(const ComplexMatrix&)> on_iterate;
};

/// Stabilizing solution of a filter Riccati problem. P is Hermitian exactly
/// (symmetrized each iteration); `residual` is measured on the original
/// equation, not the transformed one.
struct CareSolution {
    ComplexMatrix P;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool closed_loop_hurwitz = false;
};

/// Cross-term elimination: Abar = A - S R^-1 Cmeas, Qbar = Q - S R^-1 S'.
/// The resulting CARE Abar P + P Abar' + Qbar - P Cmeas' R^-1 Cmeas P = 0 has
/// the same solution set. Qbar is asserted Hermitian PSD.
struct StandardForm {
    ComplexMatrix Abar;
    ComplexMatrix Cmeas;
    ComplexMatrix Qbar;
    ComplexMatrix R;
};

StandardForm to_standard_form(const FilterCareProblem& p);

/// Newton-Kleinman iteration over Lyapunov solves. Each step solves
/// (Abar - Kbar Cmeas) P + P (.)' + Qbar + Kbar R Kbar' = 0 and updates
/// Kbar = P Cmeas' R^-1. The default initial gain keeps the closed loop at A,
/// valid whenever A is Hurwitz (true for every physically realizable system
/// in scope); otherwise SolveOptions::initial_gain must stabilize. The
/// returned P is certified stabilizing via is_hurwitz.
CareSolution solve_filter_care(const FilterCareProblem& p, const SolveOptions& opts = {});

/// Frobenius norm of A P + P A' + Q - (S + P Cmeas') R^-1 (S + P Cmeas')'.
double care_residual(const FilterCareProblem& p, const ComplexMatrix& P);

} // namespace qest
