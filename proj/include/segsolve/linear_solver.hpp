#pragma once

// Reduced interior systems of the form
//
//     -Lap_h u + (w / eps) u = f   at interior nodes,   u = g on the boundary,
//
// with the five-point Laplacian and a lumped (diagonal) mass matrix. With a
// diagonal mass the boundary coupling of the weight term vanishes, so only
// the stiffness couples to the trace.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "segsolve/grid.hpp"

namespace segsolve {

struct HelmholtzProblem {
    /// Nonnegative coefficient per node (only interior values are used).
    ScalarField weight;
    double epsilon = 1.0;
    /// Dirichlet data; only boundary values are read.
    ScalarField trace;
    /// Interior load f; absent means zero.
    std::optional<ScalarField> load;
};

struct SolverControls {
    /// Target for ||r||_{D^-1} / ||b||_{D^-1} with D the Jacobi diagonal.
    double rel_tol = 1e-10;
    /// 0 selects 10 * (interior node count).
    std::size_t max_iters = 0;
};

struct SolveStats {
    std::size_t iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;  // relative, preconditioned norm
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
    std::size_t iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

/// Jacobi-preconditioned CG. `initial_guess`, when given, seeds the interior
/// unknowns. Boundary values of the result equal the trace exactly.
ScalarField solve_helmholtz(const HelmholtzProblem& p, const SolverControls& ctl = {},
                            const ScalarField* initial_guess = nullptr,
                            SolveStats* stats = nullptr);

ScalarField harmonic_extension(const ScalarField& trace, const SolverControls& ctl = {},
                               SolveStats* stats = nullptr);

/// Interior-node cap for the dense oracle.
inline constexpr std::size_t kDenseOracleMaxUnknowns = 400;

/// Same reduced system assembled densely and solved by Cholesky.
ScalarField dense_oracle_solve(const HelmholtzProblem& p);

/// Residual of the reduced system, relative in the preconditioned norm.
double helmholtz_relative_residual(const HelmholtzProblem& p, const ScalarField& u);

}  // namespace segsolve
