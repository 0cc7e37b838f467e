#pragma once

#include <optional>
#include <vector>

#include "qest/qsys.hpp"

namespace qest {

struct SolveOptions; // care.hpp

/// Homodyne detector bank: one quadrature angle per measured channel and the
/// derived measurement matrix L = [diag(cos th_i)  diag(sin th_i)], m x 2m.
/// L L' = I holds by construction.
struct HomodyneSetup {
    std::vector<double> angles_rad;
    ComplexMatrix L;

    std::size_t channels() const { return angles_rad.size(); }

    /// Degrees are reduced mod 360 before the single deg->rad conversion, so
    /// th and th + 360 produce bit-identical matrices.
    static HomodyneSetup from_degrees(const std::vector<double>& angles_deg);
};

/// Builds the measurement matrix from angles in radians. Throws
/// EmptyAnglesError on an empty list.
HomodyneSetup homodyne_matrix(const std::vector<double>& angles_rad);

/// Filter Riccati data A P + P A' + Q - (S + P Cmeas') R^-1 (S + P Cmeas')' = 0
/// together with the cost row Cz. Built by the problem assemblers below,
/// which also assert the projection structure Q - S R^-1 S' >= 0.
struct FilterCareProblem {
    enum class Scheme { classical, coherent };

    ComplexMatrix A;     ///< 2N x 2N
    ComplexMatrix Cmeas; ///< m x 2N
    ComplexMatrix Q;     ///< 2N x 2N Hermitian PSD
    ComplexMatrix S;     ///< 2N x m
    ComplexMatrix R;     ///< m x m Hermitian PD
    ComplexMatrix Cz;    ///< 1 x 2N cost row (may be empty)
    Scheme scheme = Scheme::classical;
};

/// Steady-state estimator realization dx_e = Fe x_e dt + Ge dy, z_hat = He x_e.
struct EstimatorMatrices {
    ComplexMatrix Fe;
    ComplexMatrix Ge;
    ComplexMatrix He;
};

/// One sweep grid point. cost_coherent is absent when no controller was
/// supplied.
struct SweepRow {
    double theta_deg = 0.0;
    double cost_classical = 0.0;
    std::optional<double> cost_coherent;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

/// Uniform homodyne-angle grid in degrees, inclusive of both endpoints.
struct AngleGrid {
    double start_deg = 0.0;
    double stop_deg = 180.0;
    std::size_t steps = 181;

    std::vector<double> values() const;
};

/// Kalman-filter problem for homodyne detection of the plant output:
/// A = F, Cmeas = L H, Q = G G', S = G L', R = L L', Cz = C. Requires the
/// canonical-noise condition K = I (NonCanonicalKError otherwise).
FilterCareProblem build_classical_problem(const QuantumSystem& plant, const HomodyneSetup& hd);

/// Series composition of plant and coherent controller:
/// F_a = [[F, 0], [Gc H, Fc]], G_a = [G; Gc K], H_a = [Kc H, Hc], K_a = Kc K,
/// Cz = [C, 0]. Requires matching channel counts and K_a = I.
QuantumSystem augment(const QuantumSystem& plant, const QuantumSystem& controller);

/// Classical problem of the augmented system; the homodyne bank measures the
/// controller's output channels.
FilterCareProblem build_coherent_problem(const QuantumSystem& plant,
                                         const QuantumSystem& controller,
                                         const HomodyneSetup& hd);

/// Optimal estimator for a solved problem: Ge = (S + P Cmeas') R^-1,
/// Fe = A - Ge Cmeas, He = Cz.
EstimatorMatrices estimator_matrices(const FilterCareProblem& p, const ComplexMatrix& P);

/// real(Cz P Cz'); throws ImaginaryCostError when the imaginary residue
/// exceeds 1e-9 (signals a non-Hermitian P upstream).
double cost_from_solution(const FilterCareProblem& p, const ComplexMatrix& P);

/// Blocks of a coherent solution P = [[P1, P2], [P2', P3]], P1 sized like the
/// plant covariance.
struct CoherentBlocks {
    ComplexMatrix P1;
    ComplexMatrix P2;
    ComplexMatrix P3;
};

CoherentBlocks coherent_blocks(const ComplexMatrix& P, std::size_t plant_state_dim);

/// Frobenius norms of the three block equations obtained by expanding the
/// coherent Riccati equation. Independent verification path: direct block
/// arithmetic, no solver involvement.
struct ExpandedResiduals {
    double plant_block = 0.0;      ///< P1 equation
    double cross_block = 0.0;      ///< P2 equation
    double controller_block = 0.0; ///< P3 equation
};

ExpandedResiduals expanded_residual(const QuantumSystem& plant, const QuantumSystem& controller,
                                    const HomodyneSetup& hd, const ComplexMatrix& P1,
                                    const ComplexMatrix& P2, const ComplexMatrix& P3);

/// Sweeps the homodyne angle over `grid`, solving the classical problem at
/// every point and the coherent one when a controller is given. The same
/// angle drives both detector banks. Grid rows are independent; this variant
/// evaluates them in parallel (OpenMP) with results assembled in grid order.
/// Row failures surface as SweepRowError naming the angle.
SweepResult sweep(const QuantumSystem& plant, const QuantumSystem* controller,
                  const AngleGrid& grid, const SolveOptions& opts);

/// Serial reference implementation; produces bit-identical rows.
SweepResult sweep_serial(const QuantumSystem& plant, const QuantumSystem* controller,
                         const AngleGrid& grid, const SolveOptions& opts);

} // namespace qest
