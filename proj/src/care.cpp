#include "qest/care.hpp"

#include <string>

namespace qest {

namespace {

/// X = B R^-1 for Hermitian positive-definite R, via R X' = B'.
ComplexMatrix right_divide(const ComplexMatrix& b, const ComplexMatrix& r) {
    try {
        return solve_linear(r, b.adjoint()).adjoint();
    } catch (const SingularError& e) {
        throw SingularRError(std::string("R is singular: ") + e.what());
    }
}

} // namespace

StandardForm to_standard_form(const FilterCareProblem& p) {
    const ComplexMatrix s_rinv = right_divide(p.S, p.R);
    StandardForm sf;
    sf.Abar = p.A - s_rinv * p.Cmeas;
    sf.Cmeas = p.Cmeas;
    ComplexMatrix qbar = p.Q - s_rinv * p.S.adjoint();
    sf.Qbar = Complex{0.5, 0.0} * (qbar + qbar.adjoint());
    sf.R = p.R;
    if (!is_positive_semidefinite_within(sf.Qbar, tolerance::kRealizability)) {
        throw InvalidProblemError("to_standard_form: Q - S R^-1 S' is not positive "
                                  "semidefinite");
    }
    return sf;
}

double care_residual(const FilterCareProblem& p, const ComplexMatrix& P) {
    if (P.rows() != p.A.rows() || P.cols() != p.A.cols()) {
        throw DimMismatchError("care_residual: P shape does not match A");
    }
    const ComplexMatrix gain_num = p.S + P * p.Cmeas.adjoint();
    const ComplexMatrix gain = right_divide(gain_num, p.R);
    const ComplexMatrix lhs =
        p.A * P + P * p.A.adjoint() + p.Q - gain * gain_num.adjoint();
    return lhs.frobenius_norm();
}

CareSolution solve_filter_care(const FilterCareProblem& p, const SolveOptions& opts) {
    if (!(opts.tol > 0.0)) {
        throw BadParameterError("solve_filter_care: tol must be positive");
    }
    const StandardForm sf = to_standard_form(p);
    const ComplexMatrix s_rinv = right_divide(p.S, p.R);

    // Kbar in transformed coordinates; original gain = Kbar + S R^-1.
    ComplexMatrix kbar;
    if (opts.initial_gain) {
        if (opts.initial_gain->rows() != p.A.rows() ||
            opts.initial_gain->cols() != p.Cmeas.rows()) {
            throw DimMismatchError("solve_filter_care: initial_gain shape mismatch");
        }
        kbar = *opts.initial_gain - s_rinv;
        if (!is_hurwitz(sf.Abar - kbar * sf.Cmeas)) {
            throw NotStabilizableError("solve_filter_care: initial_gain does not stabilize "
                                       "A - gain * Cmeas");
        }
    } else {
        kbar = -s_rinv; // closed loop = A
        if (!is_hurwitz(p.A)) {
            throw NotStabilizableError("solve_filter_care: A is not Hurwitz and no "
                                       "initial_gain was supplied");
        }
    }

    const double target = opts.tol * (1.0 + p.Q.frobenius_norm());
    CareSolution sol;
    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        const ComplexMatrix closed = sf.Abar - kbar * sf.Cmeas;
        const ComplexMatrix forcing = sf.Qbar + kbar * sf.R * kbar.adjoint();
        ComplexMatrix pk;
        try {
            pk = lyapunov_solve(closed, forcing);
        } catch (const SingularError& e) {
            throw NotStabilizableError("solve_filter_care: Lyapunov step singular at "
                                       "iteration " +
                                       std::to_string(k) + ": " + e.what());
        }
        if (opts.on_iterate) {
            opts.on_iterate(pk);
        }
        sol.P = std::move(pk);
        sol.iterations = k + 1;
        sol.residual = care_residual(p, sol.P);
        if (sol.residual <= target) {
            const ComplexMatrix gain = right_divide(p.S + sol.P * p.Cmeas.adjoint(), p.R);
            sol.closed_loop_hurwitz = is_hurwitz(p.A - gain * p.Cmeas);
            if (!sol.closed_loop_hurwitz) {
                throw NotStabilizableError("solve_filter_care: converged solution is not "
                                           "stabilizing");
            }
            return sol;
        }
        kbar = right_divide(sol.P * sf.Cmeas.adjoint(), sf.R);
    }
    throw MaxIterationsError("solve_filter_care: residual " + std::to_string(sol.residual) +
                             " above target after " + std::to_string(opts.max_iter) +
                             " iterations");
}

} // namespace qest
