#include "segsolve/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segsolve {

std::string to_string(PenaltyScheme s) {
    switch (s) {
        case PenaltyScheme::picard: return "picard";
        case PenaltyScheme::gauss_seidel: return "gauss_seidel";
        case PenaltyScheme::semi_implicit: return "semi_implicit";
        case PenaltyScheme::phase_field: return "phase_field";
    }
    return "picard";
}

std::optional<PenaltyScheme> parse_penalty_scheme(const std::string& s) {
    for (auto v : {PenaltyScheme::picard, PenaltyScheme::gauss_seidel,
                   PenaltyScheme::semi_implicit, PenaltyScheme::phase_field})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

void PenaltyConfig::validate() const {
    if (!(epsilon_target > 0.0)) throw std::invalid_argument("epsilon_target must be positive");
    if (!(epsilon_start >= epsilon_target))
        throw std::invalid_argument("epsilon_start must be >= epsilon_target");
    if (!(continuation_factor > 0.0 && continuation_factor < 1.0))
        throw std::invalid_argument("continuation_factor must lie in (0,1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("damping must lie in (0,1]");
    if (!(outer_tol > 0.0)) throw std::invalid_argument("outer_tol must be positive");
    if (max_outer == 0) throw std::invalid_argument("max_outer must be at least 1");
}

std::vector<double> PenaltyConfig::ladder() const {
    std::vector<double> eps;
    double e = epsilon_start;
    // 1e-12 relative slack so that 1e-2 * 0.1^k lands on the target instead
    // of producing an extra stage a rounding error away from it.
    while (e > epsilon_target * (1.0 + 1e-12)) {
        eps.push_back(e);
        e *= continuation_factor;
    }
    eps.push_back(epsilon_target);
    return eps;
}

namespace {

// (u_a u_b)^2 at every node.
ScalarField pair_weight(const ScalarField& a, const ScalarField& b) {
    ScalarField w(a.grid());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double p = a[k] * b[k];
        w[k] = p * p;
    }
    return w;
}

ScalarField solve_component(const ScalarField& weight, double eps, const ScalarField& trace,
                            const ScalarField& guess, const SolverControls& ctl,
                            std::size_t& cg_iters, std::optional<ScalarField> load = std::nullopt) {
    HelmholtzProblem p{weight, eps, trace, std::move(load)};
    SolveStats st;
    ScalarField v = solve_helmholtz(p, ctl, &guess, &st);
    cg_iters += st.iterations;
    return v;
}

void damp(ScalarField& v, const ScalarField& old, const ScalarField& trace, double alpha) {
    const Grid& g = v.grid();
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = g.is_boundary(k) ? trace[k] : alpha * v[k] + (1.0 - alpha) * old[k];
}

void require_compatible(const SystemState& s, const BoundaryTrace& trace, double eps) {
    if (!(s.grid() == trace.grid())) throw std::invalid_argument("state and trace grids differ");
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

StepResult sequential_sweep(const SystemState& s, const BoundaryTrace& trace, double eps,
                            const SolverControls& ctl, double alpha) {
    require_compatible(s, trace, eps);
    StepResult out{s, 0};
    const ScalarField& u1 = s[0];
    const ScalarField& u2 = s[1];
    const ScalarField& u3 = s[2];
    const Grid& g = s.grid();

    ScalarField v1 = solve_component(pair_weight(u2, u3), eps, trace[0], u1, ctl, out.cg_iters);
    if (alpha < 1.0) damp(v1, u1, trace[0], alpha);

    ScalarField w2(g);
    for (std::size_t k = 0; k < w2.size(); ++k)
        w2[k] = u3[k] * u3[k] * (u1[k] * u1[k] + v1[k] * v1[k]) / 2.0;
    ScalarField v2 = solve_component(w2, eps, trace[1], u2, ctl, out.cg_iters);
    if (alpha < 1.0) damp(v2, u2, trace[1], alpha);

    ScalarField w3(g);
    for (std::size_t k = 0; k < w3.size(); ++k) {
        const double old_pair = u1[k] * u2[k];
        const double new_pair = v1[k] * v2[k];
        w3[k] = (old_pair * old_pair + new_pair * new_pair) / 2.0;
    }
    ScalarField v3 = solve_component(w3, eps, trace[2], u3, ctl, out.cg_iters);
    if (alpha < 1.0) damp(v3, u3, trace[2], alpha);

    out.state = SystemState(std::move(v1), std::move(v2), std::move(v3));
    return out;
}

}  // namespace

StepResult picard_step(const SystemState& s, const BoundaryTrace& trace, double eps, double alpha,
                       const SolverControls& ctl) {
    require_compatible(s, trace, eps);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("damping must lie in [0,1]");
    StepResult out{s, 0};
    for (int c = 0; c < 3; ++c) {
        const ScalarField w = pair_weight(s[(c + 1) % 3], s[(c + 2) % 3]);
        ScalarField v = solve_component(w, eps, trace[c], s[c], ctl, out.cg_iters);
        damp(v, s[c], trace[c], alpha);
        out.state[c] = std::move(v);
    }
    return out;
}

StepResult gauss_seidel_step(const SystemState& s, const BoundaryTrace& trace, double eps,
                             const SolverControls& ctl, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("damping must lie in (0,1]");
    return sequential_sweep(s, trace, eps, ctl, alpha);
}

StepResult semi_implicit_step(const SystemState& s, const BoundaryTrace& trace, double eps,
                              const SolverControls& ctl) {
    return sequential_sweep(s, trace, eps, ctl, 1.0);
}

StepResult phase_field_step(const SystemState& s, const BoundaryTrace& trace, double eps,
                            const SolverControls& ctl) {
    require_compatible(s, trace, eps);
    StepResult out{s, 0};
    const Grid& g = s.grid();
    for (int c = 0; c < 3; ++c) {
        const ScalarField w = pair_weight(s[(c + 1) % 3], s[(c + 2) % 3]);
        ScalarField load(g);
        for (std::size_t k = 0; k < load.size(); ++k) load[k] = -w[k] * s[c][k] / (2.0 * eps);
        ScalarField v = solve_component(w, 2.0 * eps, trace[c], s[c], ctl, out.cg_iters,
                                        std::move(load));
        for (double& x : v.values()) x = std::max(x, 0.0);
        out.state[c] = std::move(v);
    }
    return out;
}

PenaltyRun run_penalty(const Grid& grid, const BoundaryTrace& trace, const PenaltyConfig& cfg,
                       const PenaltyObserver& observer) {
    cfg.validate();
    if (!(trace.grid() == grid)) throw std::invalid_argument("trace grid differs from run grid");

    PenaltyRun run{SystemState(grid), {}, {}, false, std::nullopt};
    try {
        for (int c = 0; c < 3; ++c) run.state[c] = harmonic_extension(trace[c], cfg.inner);
    } catch (const ConvergenceError& e) {
        run.error = std::string("harmonic extension: ") + e.what();
        return run;
    }

    bool all_converged = true;
    for (double eps : cfg.ladder()) {
        PenaltyStage stage{eps, 0, false, 0.0, 0.0, 0.0};
        for (std::size_t it = 1; it <= cfg.max_outer; ++it) {
            auto do_step = [&]() -> StepResult {
                switch (cfg.scheme) {
                    case PenaltyScheme::gauss_seidel:
                        return gauss_seidel_step(run.state, trace, eps, cfg.inner,
                                                 cfg.damp_gauss_seidel ? cfg.alpha : 1.0);
                    case PenaltyScheme::semi_implicit:
                        return semi_implicit_step(run.state, trace, eps, cfg.inner);
                    case PenaltyScheme::phase_field:
                        return phase_field_step(run.state, trace, eps, cfg.inner);
                    case PenaltyScheme::picard:
                        break;
                }
                return picard_step(run.state, trace, eps, cfg.alpha, cfg.inner);
            };
            std::optional<StepResult> attempt;
            try {
                attempt = do_step();
            } catch (const ConvergenceError& e) {
                run.error = "stage eps=" + format_real(eps) + " iteration " + std::to_string(it) +
                            ": " + e.what();
                stage.iterations = it - 1;
                run.stages.push_back(stage);
                return run;
            }
            StepResult& step = *attempt;

            const double step_norm = max_l2_diff(step.state, run.state);
            run.state = std::move(step.state);
            const Violation viol = product_violation(run.state);

            PenaltyIteration rec;
            rec.stage_epsilon = eps;
            rec.iter = it;
            rec.scheme = cfg.scheme;
            rec.energy = dirichlet_energy(run.state);
            rec.penalty_energy = viol.l2 * viol.l2 / eps;
            rec.step_norm = step_norm;
            rec.cg_iters = step.cg_iters;
            run.history.push_back(rec);
            if (observer) observer(run.state, rec);

            stage.iterations = it;
            stage.step_norm = step_norm;
            stage.energy = rec.energy;
            stage.product_l2 = viol.l2;
            if (step_norm < cfg.outer_tol) {
                stage.converged = true;
                break;
            }
        }
        all_converged = all_converged && stage.converged;
        run.stages.push_back(stage);
    }
    run.converged = all_converged;
    return run;
}

}  // namespace segsolve
