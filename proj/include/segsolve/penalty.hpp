#pragma once

// Penalized system  -Lap u_i + (1/eps) u_i (u_j u_k)^2 = 0,  u_i = phi_i on
// the boundary, solved by fixed-point sweeps of weighted Helmholtz problems
// and a geometric continuation ladder in eps.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segsolve/boundary.hpp"
#include "segsolve/grid.hpp"
#include "segsolve/linear_solver.hpp"

namespace segsolve {

enum class PenaltyScheme { picard, gauss_seidel, semi_implicit, phase_field };

std::string to_string(PenaltyScheme s);
std::optional<PenaltyScheme> parse_penalty_scheme(const std::string& s);

struct PenaltyConfig {
    double epsilon_target = 1e-4;
    double epsilon_start = 1e-2;
    double continuation_factor = 0.1;
    /// Damping of the Picard update; also used by Gauss-Seidel when
    /// damp_gauss_seidel is set.
    double alpha = 0.5;
    bool damp_gauss_seidel = false;
    double outer_tol = 1e-8;
    std::size_t max_outer = 500;
    PenaltyScheme scheme = PenaltyScheme::picard;
    SolverControls inner{};

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;
    /// eps_start, eps_start*f, ... clamped so the last entry is eps_target.
    std::vector<double> ladder() const;
};

/// Result of one sweep together with the inner CG work it took.
struct StepResult {
    SystemState state;
    std::size_t cg_iters = 0;
};

/// Jacobi half-steps on (u_j u_k)^2 weights followed by convex damping.
StepResult picard_step(const SystemState& s, const BoundaryTrace& trace, double eps, double alpha,
                       const SolverControls& ctl = {});
/// Sequential sweep with coefficients (u2u3)^2, u3^2(u1^2+v1^2)/2 and
/// ((u1u2)^2+(v1v2)^2)/2. With alpha < 1 each new component is damped
/// before it enters the next coefficient.
StepResult gauss_seidel_step(const SystemState& s, const BoundaryTrace& trace, double eps,
                             const SolverControls& ctl = {}, double alpha = 1.0);
/// Symmetrized coupling; coefficients use the average of old and new squares.
StepResult semi_implicit_step(const SystemState& s, const BoundaryTrace& trace, double eps,
                              const SolverControls& ctl = {});
/// -Lap v + w v/(2eps) = -w u/(2eps), then clip at zero.
StepResult phase_field_step(const SystemState& s, const BoundaryTrace& trace, double eps,
                            const SolverControls& ctl = {});

struct PenaltyIteration {
    double stage_epsilon = 0.0;
    std::size_t iter = 0;  // 1-based within the stage
    PenaltyScheme scheme = PenaltyScheme::picard;
    double energy = 0.0;
    double penalty_energy = 0.0;  // (1/eps) ||u1 u2 u3||^2
    double step_norm = 0.0;
    std::size_t cg_iters = 0;
};

struct PenaltyStage {
    double epsilon = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double step_norm = 0.0;
    double energy = 0.0;
    double product_l2 = 0.0;
};

struct PenaltyRun {
    SystemState state;
    std::vector<PenaltyIteration> history;
    std::vector<PenaltyStage> stages;
    bool converged = false;  // every stage converged and no inner failure
    std::optional<std::string> error;  // inner solve failure; the run stopped there
};

using PenaltyObserver = std::function<void(const SystemState&, const PenaltyIteration&)>;

/// Harmonic-extension start, then the chosen scheme on each eps stage until
/// the max L2 step falls below outer_tol. Non-converged stages seed the next
/// one with their last iterate.
PenaltyRun run_penalty(const Grid& grid, const BoundaryTrace& trace, const PenaltyConfig& cfg,
                       const PenaltyObserver& observer = {});

}  // namespace segsolve
