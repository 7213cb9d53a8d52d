#pragma once

// Projected gradient descent and its accelerated (FISTA) variant for the
// Dirichlet energy over the segregation set. The gradient step is heat flow,
// u + alpha * Lap_h u, followed by the pointwise projection and a reset of
// the Dirichlet data.

#include <functional>
#include <optional>
#include <vector>

#include "segsolve/boundary.hpp"
#include "segsolve/grid.hpp"
#include "segsolve/linear_solver.hpp"
#include "segsolve/projection.hpp"

namespace segsolve {

/// h^2 for the step-size defaults, h = min(hx, hy).
double grid_h2(const Grid& g);
/// Upper bound 4/hx^2 + 4/hy^2 on the largest eigenvalue of -Lap_h.
double laplacian_lambda_max_bound(const Grid& g);

struct PgdConfig {
    double alpha = 0.0;  // 0 selects 0.1 h^2
    double tol = 1e-8;
    std::size_t max_iters = 50000;
    double tau = 0.0;

    /// Resolves defaults for `g` and enforces alpha < 1/lambda_max.
    PgdConfig resolved(const Grid& g) const;
};

struct FistaConfig {
    double alpha0 = 0.0;     // 0 selects 0.03 h^2
    double alpha_min = 0.0;  // 0 selects 1e-5 h^2
    double rho = 0.5;
    double eta = 0.2;
    double tau = 1e-10;
    double tol = 1e-8;
    std::size_t max_iters = 20000;

    FistaConfig resolved(const Grid& g) const;
};

struct MomentumState {
    double t = 1.0;

    /// Advances t and returns the extrapolation weight (t_k - 1) / t_{k+1}.
    double advance();
    void restart() { t = 1.0; }
};

struct GradientIteration {
    std::size_t iter = 0;
    double energy = 0.0;
    double violation_max = 0.0;
    double step_norm = 0.0;
    double alpha = 0.0;
    std::size_t shrinks = 0;
    bool restart = false;
    /// Backtracking from u^k itself found no decrease; the iterate is kept.
    bool stalled = false;
};

struct GradientRun {
    SystemState state;
    PhaseAssignment phases;
    std::vector<GradientIteration> history;
    std::size_t iterations = 0;
    bool converged = false;
    /// FISTA only: no decrease even from u^k at alpha_min; the run stopped there.
    bool stalled = false;
    /// ||u - P(u + alpha Lap_h u)|| / alpha at the returned state (recorded only).
    double pg_residual = 0.0;
};

using GradientObserver = std::function<void(const SystemState&, const GradientIteration&)>;

/// Harmonic extensions of the trace, projected onto S.
FieldProjection projected_harmonic_start(const BoundaryTrace& trace,
                                         const SolverControls& ctl = {});

GradientRun pgd_run(const Grid& grid, const BoundaryTrace& trace, const PgdConfig& cfg,
                    const GradientObserver& observer = {});

GradientRun fista_run(const Grid& grid, const BoundaryTrace& trace, const FistaConfig& cfg,
                      const GradientObserver& observer = {});

/// What backtracking compares against: the current iterate and its energy.
struct BacktrackContext {
    const SystemState& current;
    double current_energy;
    const PhaseAssignment& phases;
    const BoundaryTrace& trace;
};

struct BacktrackResult {
    FieldProjection candidate;
    double energy = 0.0;
    double alpha = 0.0;
    std::size_t shrinks = 0;
    /// No trial down to alpha_min reached current_energy.
    bool restart = false;
};

/// Trial steps alpha, rho*alpha, ... (floored at alpha_min) from y; each is
/// prox-biased toward the current iterate, projected, and boundary-reset.
/// `cfg` must already be resolved.
BacktrackResult backtrack(const SystemState& y, double alpha, const FistaConfig& cfg,
                          const BacktrackContext& ctx);

/// ||u - P(u + alpha Lap_h u)||_{L2} / alpha with tau = 0 and max over components.
double projected_gradient_residual(const SystemState& u, const BoundaryTrace& trace, double alpha);

}  // namespace segsolve
