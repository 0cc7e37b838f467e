#include "qest/estimation.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <utility>

#include "qest/care.hpp"

namespace qest {

namespace {

void require_channels(const HomodyneSetup& hd, std::size_t m, const char* where) {
    if (hd.channels() != m) {
        throw DimMismatchError(std::string(where) + ": homodyne bank has " +
                               std::to_string(hd.channels()) + " channel(s), system has " +
                               std::to_string(m));
    }
}

void require_canonical(const ComplexMatrix& k, const char* where) {
    const double dev = (k - ComplexMatrix::identity(k.rows())).frobenius_norm();
    if (dev > tolerance::kRealizability) {
        throw NonCanonicalKError(std::string(where) + ": scattering matrix differs from "
                                 "identity by " +
                                 std::to_string(dev) + "; canonical noise requires K = I");
    }
}

FilterCareProblem assemble_problem(const QuantumSystem& sys, const HomodyneSetup& hd,
                                   FilterCareProblem::Scheme scheme, const char* where) {
    require_channels(hd, sys.m, where);
    require_canonical(sys.K, where);

    FilterCareProblem p;
    p.A = sys.F;
    p.Cmeas = hd.L * sys.H;
    ComplexMatrix q = sys.G * sys.G.adjoint();
    p.Q = Complex{0.5, 0.0} * (q + q.adjoint());
    p.S = sys.G * hd.L.adjoint();
    p.R = hd.L * hd.L.adjoint();
    p.Cz = sys.C;
    p.scheme = scheme;

    // projection structure: Q - S R^-1 S' = G (I - L'(LL')^-1 L) G' >= 0
    const ComplexMatrix qbar = p.Q - p.S * solve_linear(p.R, p.S.adjoint());
    if (!is_positive_semidefinite_within(qbar, tolerance::kRealizability)) {
        throw InvalidProblemError(std::string(where) +
                                  ": Q - S R^-1 S' is not positive semidefinite");
    }
    return p;
}

SweepRow compute_sweep_row(const QuantumSystem& plant, const QuantumSystem* controller,
                           double theta_deg, const SolveOptions& opts) {
    SweepRow row;
    row.theta_deg = theta_deg;
    try {
        const auto hd_plant =
            HomodyneSetup::from_degrees(std::vector<double>(plant.m, theta_deg));
        const FilterCareProblem classical = build_classical_problem(plant, hd_plant);
        const CareSolution csol = solve_filter_care(classical, opts);
        row.cost_classical = cost_from_solution(classical, csol.P);

        if (controller != nullptr) {
            const auto hd_ctrl =
                HomodyneSetup::from_degrees(std::vector<double>(controller->m, theta_deg));
            const FilterCareProblem coherent =
                build_coherent_problem(plant, *controller, hd_ctrl);
            const CareSolution qsol = solve_filter_care(coherent, opts);
            row.cost_coherent = cost_from_solution(coherent, qsol.P);
        }
    } catch (const SweepRowError&) {
        throw;
    } catch (const Error& e) {
        throw SweepRowError(theta_deg, e.what());
    }
    return row;
}

} // namespace

HomodyneSetup homodyne_matrix(const std::vector<double>& angles_rad) {
    if (angles_rad.empty()) {
        throw EmptyAnglesError("homodyne_matrix: at least one angle is required");
    }
    const std::size_t m = angles_rad.size();
    ComplexMatrix l(m, 2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        l(i, i) = std::cos(angles_rad[i]);
        l(i, m + i) = std::sin(angles_rad[i]);
    }
    return {angles_rad, std::move(l)};
}

HomodyneSetup HomodyneSetup::from_degrees(const std::vector<double>& angles_deg) {
    std::vector<double> rad;
    rad.reserve(angles_deg.size());
    for (double deg : angles_deg) {
        rad.push_back(std::fmod(deg, 360.0) * (std::numbers::pi / 180.0));
    }
    return homodyne_matrix(rad);
}

std::vector<double> AngleGrid::values() const {
    if (steps == 0) {
        throw BadParameterError("AngleGrid: steps must be >= 1");
    }
    if (stop_deg < start_deg) {
        throw BadParameterError("AngleGrid: stop must not precede start");
    }
    std::vector<double> v;
    v.reserve(steps);
    if (steps == 1) {
        v.push_back(start_deg);
        return v;
    }
    const double step = (stop_deg - start_deg) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) {
        v.push_back(start_deg + static_cast<double>(i) * step);
    }
    return v;
}

FilterCareProblem build_classical_problem(const QuantumSystem& plant, const HomodyneSetup& hd) {
    return assemble_problem(plant, hd, FilterCareProblem::Scheme::classical,
                            "build_classical_problem");
}

QuantumSystem augment(const QuantumSystem& plant, const QuantumSystem& controller) {
    if (controller.m != plant.m) {
        throw DimMismatchError("augment: controller expects " + std::to_string(controller.m) +
                               " input channel(s), plant provides " + std::to_string(plant.m));
    }
    const ComplexMatrix ka = controller.K * plant.K;
    require_canonical(ka, "augment");

    const std::size_t np2 = 2 * plant.n;
    const std::size_t nc2 = 2 * controller.n;

    ComplexMatrix fa(np2 + nc2, np2 + nc2);
    fa.set_block(0, 0, plant.F);
    fa.set_block(np2, 0, controller.G * plant.H);
    fa.set_block(np2, np2, controller.F);

    const ComplexMatrix ga = vstack(plant.G, controller.G * plant.K);
    const ComplexMatrix ha = hstack(controller.K * plant.H, controller.H);

    ComplexMatrix ca;
    if (plant.has_cost_row()) {
        ca = hstack(plant.C, ComplexMatrix::zero(1, nc2));
    }

    // State ordering is [a; a#; a_c; a_c#] (stacked doubled blocks), so the
    // aggregate is built directly rather than through the Delta-validating
    // factory.
    QuantumSystem aug;
    aug.n = plant.n + controller.n;
    aug.m = plant.m;
    aug.F = std::move(fa);
    aug.G = ga;
    aug.H = ha;
    aug.K = ka;
    aug.C = std::move(ca);
    return aug;
}

FilterCareProblem build_coherent_problem(const QuantumSystem& plant,
                                         const QuantumSystem& controller,
                                         const HomodyneSetup& hd) {
    require_channels(hd, controller.m, "build_coherent_problem");
    const QuantumSystem aug = augment(plant, controller);
    return assemble_problem(aug, hd, FilterCareProblem::Scheme::coherent,
                            "build_coherent_problem");
}

EstimatorMatrices estimator_matrices(const FilterCareProblem& p, const ComplexMatrix& P) {
    if (P.rows() != p.A.rows() || P.cols() != p.A.cols()) {
        throw DimMismatchError("estimator_matrices: P shape does not match A");
    }
    ComplexMatrix ge;
    try {
        ge = solve_linear(p.R, (p.S + P * p.Cmeas.adjoint()).adjoint()).adjoint();
    } catch (const SingularError& e) {
        throw SingularRError(std::string("estimator_matrices: ") + e.what());
    }
    EstimatorMatrices est;
    est.Fe = p.A - ge * p.Cmeas;
    est.Ge = std::move(ge);
    est.He = p.Cz;
    return est;
}

double cost_from_solution(const FilterCareProblem& p, const ComplexMatrix& P) {
    if (p.Cz.empty()) {
        throw BadParameterError("cost_from_solution: problem has no cost row");
    }
    if (P.rows() != p.Cz.cols() || !P.square()) {
        throw DimMismatchError("cost_from_solution: P shape does not match the cost row");
    }
    const ComplexMatrix v = p.Cz * P * p.Cz.adjoint();
    const Complex c = v(0, 0);
    if (std::abs(c.imag()) > 1e-9) {
        throw ImaginaryCostError("cost_from_solution: imaginary residue " +
                                 std::to_string(c.imag()) + " exceeds tolerance");
    }
    return c.real();
}

CoherentBlocks coherent_blocks(const ComplexMatrix& P, std::size_t plant_state_dim) {
    if (!P.square() || plant_state_dim > P.rows()) {
        throw DimMismatchError("coherent_blocks: invalid partition");
    }
    const std::size_t d = plant_state_dim;
    const std::size_t r = P.rows() - d;
    return {P.block(0, 0, d, d), P.block(0, d, d, r), P.block(d, d, r, r)};
}

ExpandedResiduals expanded_residual(const QuantumSystem& plant, const QuantumSystem& controller,
                                    const HomodyneSetup& hd, const ComplexMatrix& P1,
                                    const ComplexMatrix& P2, const ComplexMatrix& P3) {
    require_channels(hd, controller.m, "expanded_residual");
    const std::size_t np2 = 2 * plant.n;
    const std::size_t nc2 = 2 * controller.n;
    if (P1.rows() != np2 || P1.cols() != np2 || P2.rows() != np2 || P2.cols() != nc2 ||
        P3.rows() != nc2 || P3.cols() != nc2) {
        throw DimMismatchError("expanded_residual: block shapes do not match the systems");
    }

    const ComplexMatrix& F = plant.F;
    const ComplexMatrix& G = plant.G;
    const ComplexMatrix& H = plant.H;
    const ComplexMatrix& Fc = controller.F;
    const ComplexMatrix& Gc = controller.G;
    const ComplexMatrix& Hc = controller.H;
    const ComplexMatrix ldl = hd.L.adjoint() * hd.L;

    const ComplexMatrix t1 = G + P1 * H.adjoint() + P2 * Hc.adjoint();
    const ComplexMatrix t2 = Gc + P2.adjoint() * H.adjoint() + P3 * Hc.adjoint();

    const ComplexMatrix r1 =
        F * P1 + P1 * F.adjoint() + G * G.adjoint() - t1 * ldl * t1.adjoint();
    const ComplexMatrix r2 = F * P2 + P1 * H.adjoint() * Gc.adjoint() + P2 * Fc.adjoint() +
                             G * Gc.adjoint() - t1 * ldl * t2.adjoint();
    const ComplexMatrix r3 = Gc * H * P2 + P2.adjoint() * H.adjoint() * Gc.adjoint() +
                             Fc * P3 + P3 * Fc.adjoint() + Gc * Gc.adjoint() -
                             t2 * ldl * t2.adjoint();

    return {r1.frobenius_norm(), r2.frobenius_norm(), r3.frobenius_norm()};
}

SweepResult sweep_serial(const QuantumSystem& plant, const QuantumSystem* controller,
                         const AngleGrid& grid, const SolveOptions& opts) {
    const std::vector<double> thetas = grid.values();
    SweepResult out;
    out.rows.reserve(thetas.size());
    for (double theta : thetas) {
        out.rows.push_back(compute_sweep_row(plant, controller, theta, opts));
    }
    return out;
}

SweepResult sweep(const QuantumSystem& plant, const QuantumSystem* controller,
                  const AngleGrid& grid, const SolveOptions& opts) {
    const std::vector<double> thetas = grid.values();
    SweepResult out;
    out.rows.resize(thetas.size());
    std::vector<std::exception_ptr> failures(thetas.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(thetas.size()); ++i) {
        try {
            out.rows[static_cast<std::size_t>(i)] =
                compute_sweep_row(plant, controller, thetas[static_cast<std::size_t>(i)], opts);
        } catch (...) {
            failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }

    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f); // first failing grid point, in grid order
        }
    }
    return out;
}

} // namespace qest
