#include "segsolve/projected_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segsolve {

double grid_h2(const Grid& g) {
    const double h = std::min(g.hx(), g.hy());
    return h * h;
}

double laplacian_lambda_max_bound(const Grid& g) {
    return 4.0 / (g.hx() * g.hx()) + 4.0 / (g.hy() * g.hy());
}

PgdConfig PgdConfig::resolved(const Grid& g) const {
    PgdConfig c = *this;
    if (c.alpha == 0.0) c.alpha = 0.1 * grid_h2(g);
    if (!(c.alpha > 0.0)) throw std::invalid_argument("PGD step size must be positive");
    if (c.alpha >= (1.0 + 1e-9) / laplacian_lambda_max_bound(g))
        throw std::invalid_argument("PGD step size " + format_real(c.alpha) +
                                    " violates the stability bound alpha < 1/lambda_max");
    if (!(c.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (c.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
    if (!(c.tau >= 0.0)) throw std::invalid_argument("hysteresis tau must be nonnegative");
    return c;
}

FistaConfig FistaConfig::resolved(const Grid& g) const {
    FistaConfig c = *this;
    const double h2 = grid_h2(g);
    if (c.alpha0 == 0.0) c.alpha0 = 0.03 * h2;
    if (c.alpha_min == 0.0) c.alpha_min = 1e-5 * h2;
    if (!(c.alpha_min > 0.0 && c.alpha_min <= c.alpha0))
        throw std::invalid_argument("FISTA needs 0 < alpha_min <= alpha0");
    if (!(c.rho > 0.0 && c.rho < 1.0)) throw std::invalid_argument("shrink rho must lie in (0,1)");
    if (!(c.eta >= 0.0)) throw std::invalid_argument("prox bias eta must be nonnegative");
    if (!(c.tau >= 0.0)) throw std::invalid_argument("hysteresis tau must be nonnegative");
    if (!(c.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (c.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
    return c;
}

double MomentumState::advance() {
    const double next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    const double beta = (t - 1.0) / next;
    t = next;
    return beta;
}

namespace {

// y + alpha * Lap_h y on interior nodes, optionally pulled toward `anchor`.
SystemState gradient_step(const SystemState& y, double alpha, const SystemState* anchor = nullptr,
                          double eta = 0.0) {
    SystemState out = y;
    const Grid& g = y.grid();
    for (int c = 0; c < 3; ++c) {
        const ScalarField lap = apply_laplacian(y[c]);
        ScalarField& o = out[c];
        for (std::size_t k = 0; k < g.size(); ++k) {
            o[k] = y[c][k] + alpha * lap[k];
            if (anchor) o[k] = (o[k] + eta * (*anchor)[c][k]) / (1.0 + eta);
        }
    }
    return out;
}

GradientIteration record_for(const SystemState& s, std::size_t iter, double step, double alpha) {
    GradientIteration rec;
    rec.iter = iter;
    rec.energy = dirichlet_energy(s);
    rec.violation_max = product_violation(s).max_abs;
    rec.step_norm = step;
    rec.alpha = alpha;
    return rec;
}

}  // namespace

FieldProjection projected_harmonic_start(const BoundaryTrace& trace, const SolverControls& ctl) {
    const Grid& g = trace.grid();
    SystemState h(g);
    for (int c = 0; c < 3; ++c) h[c] = harmonic_extension(trace[c], ctl);
    return project_field(h, trace);
}

double projected_gradient_residual(const SystemState& u, const BoundaryTrace& trace, double alpha) {
    const auto next = project_field(gradient_step(u, alpha), trace);
    return max_l2_diff(next.state, u) / alpha;
}

GradientRun pgd_run(const Grid& grid, const BoundaryTrace& trace, const PgdConfig& config,
                    const GradientObserver& observer) {
    const PgdConfig cfg = config.resolved(grid);
    if (!(trace.grid() == grid)) throw std::invalid_argument("trace grid differs from run grid");
    const ProjectionControls pctl{cfg.tau};

    FieldProjection cur = projected_harmonic_start(trace);
    GradientRun run{cur.state, cur.phases, {}, 0, false, false, 0.0};
    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        FieldProjection next = project_field(gradient_step(cur.state, cfg.alpha), trace,
                                             cfg.tau > 0.0 ? &cur.phases : nullptr, pctl);
        const double step = max_l2_diff(next.state, cur.state);
        cur = std::move(next);
        const GradientIteration rec = record_for(cur.state, k, step, cfg.alpha);
        run.history.push_back(rec);
        if (observer) observer(cur.state, rec);
        run.iterations = k;
        if (step < cfg.tol) {
            run.converged = true;
            break;
        }
    }
    run.state = std::move(cur.state);
    run.phases = std::move(cur.phases);
    run.pg_residual = projected_gradient_residual(run.state, trace, cfg.alpha);
    return run;
}

BacktrackResult backtrack(const SystemState& y, double alpha, const FistaConfig& cfg,
                          const BacktrackContext& ctx) {
    const ProjectionControls pctl{cfg.tau};
    const PhaseAssignment* prev = cfg.tau > 0.0 ? &ctx.phases : nullptr;
    double a = std::max(alpha, cfg.alpha_min);
    std::size_t shrinks = 0;
    while (true) {
        SystemState trial = gradient_step(y, a, cfg.eta > 0.0 ? &ctx.current : nullptr, cfg.eta);
        FieldProjection cand = project_field(trial, ctx.trace, prev, pctl);
        const double e = dirichlet_energy(cand.state);
        if (e <= ctx.current_energy) return {std::move(cand), e, a, shrinks, false};
        if (a <= cfg.alpha_min) return {std::move(cand), e, a, shrinks, true};
        a = std::max(a * cfg.rho, cfg.alpha_min);
        ++shrinks;
    }
}

GradientRun fista_run(const Grid& grid, const BoundaryTrace& trace, const FistaConfig& config,
                      const GradientObserver& observer) {
    const FistaConfig cfg = config.resolved(grid);
    if (!(trace.grid() == grid)) throw std::invalid_argument("trace grid differs from run grid");

    FieldProjection cur = projected_harmonic_start(trace);
    double energy = dirichlet_energy(cur.state);
    SystemState y = cur.state;
    MomentumState momentum;
    double alpha = cfg.alpha0;

    GradientRun run{cur.state, cur.phases, {}, 0, false, false, 0.0};
    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        BacktrackResult bt = backtrack(y, alpha, cfg, {cur.state, energy, cur.phases, trace});
        bool restarted = false;
        bool stalled = false;
        std::size_t shrinks = bt.shrinks;
        if (bt.restart) {
            restarted = true;
            momentum.restart();
            y = cur.state;
            alpha = cfg.alpha0;
            bt = backtrack(y, alpha, cfg, {cur.state, energy, cur.phases, trace});
            shrinks += bt.shrinks;
            if (bt.restart) {
                stalled = true;
                bt.candidate = cur;
                bt.energy = energy;
            }
        }
        alpha = bt.alpha;

        const double beta = momentum.advance();
        const SystemState& next = bt.candidate.state;
        const double step = max_l2_diff(next, cur.state);
        for (int c = 0; c < 3; ++c)
            for (std::size_t n = 0; n < grid.size(); ++n)
                y[c][n] = next[c][n] + beta * (next[c][n] - cur.state[c][n]);
        cur = std::move(bt.candidate);
        energy = bt.energy;

        GradientIteration rec;
        rec.iter = k;
        rec.energy = energy;
        rec.violation_max = product_violation(cur.state).max_abs;
        rec.step_norm = step;
        rec.alpha = alpha;
        rec.shrinks = shrinks;
        rec.restart = restarted;
        rec.stalled = stalled;
        run.history.push_back(rec);
        if (observer) observer(cur.state, rec);
        run.iterations = k;
        if (stalled) {
            run.stalled = true;
            break;
        }
        if (step < cfg.tol) {
            run.converged = true;
            break;
        }
    }
    run.state = std::move(cur.state);
    run.phases = std::move(cur.phases);
    run.pg_residual = projected_gradient_residual(run.state, trace, cfg.alpha0);
    return run;
}

}  // namespace segsolve
