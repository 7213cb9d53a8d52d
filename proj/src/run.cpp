#include "segsolve/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "segsolve/diagnostics.hpp"
#include "segsolve/penalty.hpp"
#include "segsolve/projected_gradient.hpp"

namespace segsolve {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::penalty_picard: return "penalty-picard";
        case Algorithm::penalty_gs: return "penalty-gs";
        case Algorithm::penalty_semi: return "penalty-semi";
        case Algorithm::penalty_phasefield: return "penalty-phasefield";
        case Algorithm::pgd: return "pgd";
        case Algorithm::fista: return "fista";
    }
    return "fista";
}

std::optional<Algorithm> parse_algorithm(const std::string& s) {
    for (auto a : {Algorithm::penalty_picard, Algorithm::penalty_gs, Algorithm::penalty_semi,
                   Algorithm::penalty_phasefield, Algorithm::pgd, Algorithm::fista})
        if (to_string(a) == s) return a;
    return std::nullopt;
}

bool is_penalty(Algorithm a) { return a != Algorithm::pgd && a != Algorithm::fista; }

namespace {

PenaltyScheme scheme_of(Algorithm a) {
    switch (a) {
        case Algorithm::penalty_gs: return PenaltyScheme::gauss_seidel;
        case Algorithm::penalty_semi: return PenaltyScheme::semi_implicit;
        case Algorithm::penalty_phasefield: return PenaltyScheme::phase_field;
        default: return PenaltyScheme::picard;
    }
}

BoundaryConfig boundary_for(const RunConfig& cfg) {
    const auto id = parse_bc_id(cfg.bc);
    if (!id) throw ConfigError("unknown boundary configuration '" + cfg.bc + "'");
    if (*id != BcId::custom) return builtin_config(*id);
    if (cfg.bc_file.empty()) throw ConfigError("bc 'custom' needs a boundary CSV (--bc-file)");
    try {
        return load_custom_config(cfg.bc_file);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

struct Prepared {
    Grid grid;
    BoundaryTrace trace;
};

Prepared prepare(const RunConfig& cfg) {
    if (cfg.n < 3) throw ConfigError("grid resolution n must be at least 3");
    const BoundaryConfig bc = boundary_for(cfg);
    Grid g = unit_square_grid(cfg.n);
    try {
        return {g, evaluate_bc(bc, g)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

PenaltyConfig penalty_config(const RunConfig& c) {
    PenaltyConfig p;
    p.epsilon_target = c.epsilon;
    p.epsilon_start = c.epsilon_start;
    p.continuation_factor = c.epsilon_factor;
    p.alpha = c.damping;
    p.damp_gauss_seidel = c.damp_gauss_seidel;
    p.outer_tol = c.tol.value_or(1e-8);
    p.max_outer = c.max_iters.value_or(500);
    p.scheme = scheme_of(c.algorithm);
    p.inner.rel_tol = c.cg_rel_tol;
    return p;
}

PgdConfig pgd_config(const RunConfig& c) {
    PgdConfig p;
    p.alpha = c.alpha.value_or(0.0);
    p.tol = c.tol.value_or(p.tol);
    p.max_iters = c.max_iters.value_or(p.max_iters);
    p.tau = c.tau.value_or(0.0);
    return p;
}

FistaConfig fista_config(const RunConfig& c) {
    FistaConfig f;
    f.alpha0 = c.alpha.value_or(0.0);
    f.alpha_min = c.alpha_min.value_or(0.0);
    f.rho = c.rho;
    f.eta = c.eta;
    f.tau = c.tau.value_or(f.tau);
    f.tol = c.tol.value_or(f.tol);
    f.max_iters = c.max_iters.value_or(f.max_iters);
    return f;
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null())
        out.reset();
    else
        out = j.at(key).get<T>();
}

template <class T>
ojson optional_json(const std::optional<T>& v) {
    return v ? ojson(*v) : ojson(nullptr);
}

}  // namespace

RunConfig RunConfig::resolved() const {
    RunConfig r = *this;
    const Prepared p = prepare(r);
    if (r.jobs == 0) throw ConfigError("--jobs must be at least 1");
    if (r.delta && !(*r.delta > 0.0)) throw ConfigError("contour level delta must be positive");
    try {
        if (is_penalty(r.algorithm)) {
            const PenaltyConfig pc = penalty_config(r);
            pc.validate();
            if (!(r.cg_rel_tol > 0.0)) throw std::invalid_argument("cg_rel_tol must be positive");
            r.tol = pc.outer_tol;
            r.max_iters = pc.max_outer;
            if (!r.delta) r.delta = std::sqrt(r.epsilon);
        } else if (r.algorithm == Algorithm::pgd) {
            const PgdConfig pc = pgd_config(r).resolved(p.grid);
            r.alpha = pc.alpha;
            r.tau = pc.tau;
            r.tol = pc.tol;
            r.max_iters = pc.max_iters;
        } else {
            const FistaConfig fc = fista_config(r).resolved(p.grid);
            r.alpha = fc.alpha0;
            r.alpha_min = fc.alpha_min;
            r.tau = fc.tau;
            r.tol = fc.tol;
            r.max_iters = fc.max_iters;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!r.delta) {
        const double m = sup_bound(p.trace);
        r.delta = m > 0.0 ? 1e-3 * m : 1e-3;
    }
    return r;
}

ojson to_json(const RunConfig& c) {
    ojson j;
    j["algorithm"] = to_string(c.algorithm);
    j["bc"] = c.bc;
    j["bc_file"] = c.bc_file;
    j["n"] = c.n;
    j["epsilon"] = c.epsilon;
    j["epsilon_start"] = c.epsilon_start;
    j["epsilon_factor"] = c.epsilon_factor;
    j["damping"] = c.damping;
    j["damp_gauss_seidel"] = c.damp_gauss_seidel;
    j["cg_rel_tol"] = c.cg_rel_tol;
    j["alpha"] = optional_json(c.alpha);
    j["alpha_min"] = optional_json(c.alpha_min);
    j["rho"] = c.rho;
    j["eta"] = c.eta;
    j["tau"] = optional_json(c.tau);
    j["tol"] = optional_json(c.tol);
    j["max_iters"] = optional_json(c.max_iters);
    j["delta"] = optional_json(c.delta);
    j["deterministic"] = c.deterministic;
    j["seed"] = c.seed;
    return j;
}

void merge_json(RunConfig& c, const nlohmann::json& j) {
    static const char* known[] = {"algorithm", "bc",        "bc_file",  "n",
                                  "epsilon",   "epsilon_start", "epsilon_factor", "damping",
                                  "damp_gauss_seidel", "cg_rel_tol", "alpha", "alpha_min",
                                  "rho",       "eta",       "tau",      "tol",
                                  "max_iters", "delta",     "output",   "jobs",
                                  "deterministic", "seed"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown config key '" + key + "'");
    }
    try {
        if (j.contains("algorithm")) {
            const auto name = j.at("algorithm").get<std::string>();
            const auto a = parse_algorithm(name);
            if (!a) throw ConfigError("unknown algorithm '" + name + "'");
            c.algorithm = *a;
        }
        read_key(j, "bc", c.bc);
        read_key(j, "bc_file", c.bc_file);
        read_key(j, "n", c.n);
        read_key(j, "epsilon", c.epsilon);
        read_key(j, "epsilon_start", c.epsilon_start);
        read_key(j, "epsilon_factor", c.epsilon_factor);
        read_key(j, "damping", c.damping);
        read_key(j, "damp_gauss_seidel", c.damp_gauss_seidel);
        read_key(j, "cg_rel_tol", c.cg_rel_tol);
        read_optional(j, "alpha", c.alpha);
        read_optional(j, "alpha_min", c.alpha_min);
        read_key(j, "rho", c.rho);
        read_key(j, "eta", c.eta);
        read_optional(j, "tau", c.tau);
        read_optional(j, "tol", c.tol);
        read_optional(j, "max_iters", c.max_iters);
        read_optional(j, "delta", c.delta);
        read_key(j, "output", c.output);
        read_key(j, "jobs", c.jobs);
        read_key(j, "deterministic", c.deterministic);
        read_key(j, "seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

void validate_run(const RunConfig& cfg) { (void)cfg.resolved(); }

namespace {

ojson penalty_history_line(const PenaltyIteration& it) {
    return {{"stage_epsilon", it.stage_epsilon}, {"iter", it.iter},
            {"scheme", to_string(it.scheme)},    {"energy", it.energy},
            {"penalty_energy", it.penalty_energy}, {"step_norm", it.step_norm},
            {"cg_iters", it.cg_iters}};
}

ojson gradient_history_line(const GradientIteration& it) {
    return {{"iter", it.iter},         {"energy", it.energy},   {"violation_max", it.violation_max},
            {"step_norm", it.step_norm}, {"alpha", it.alpha},   {"shrinks", it.shrinks},
            {"restart", it.restart},   {"stalled", it.stalled}};
}

}  // namespace

RunOutcome execute_run(const RunConfig& input) {
    const RunConfig cfg = input.resolved();
    const auto t0 = std::chrono::steady_clock::now();
    Prepared p = prepare(cfg);
    const Grid& g = p.grid;

    RunOutcome out{cfg, g, SystemState(g), std::nullopt, {}, {}, {}, false, 0, 0.0, 0.0,
                   std::nullopt};
    ojson extra;
    if (is_penalty(cfg.algorithm)) {
        const PenaltyConfig pc = penalty_config(cfg);
        PenaltyRun run = run_penalty(g, p.trace, pc, [&](const SystemState&, const PenaltyIteration& it) {
            out.history.push_back(penalty_history_line(it).dump());
        });
        out.state = std::move(run.state);
        out.converged = run.converged;
        out.error = run.error;
        ojson stages = ojson::array();
        for (const auto& s : run.stages) {
            out.iterations += s.iterations;
            stages.push_back({{"epsilon", s.epsilon},
                              {"iterations", s.iterations},
                              {"converged", s.converged},
                              {"step_norm", s.step_norm},
                              {"energy", s.energy},
                              {"product_l2", s.product_l2}});
        }
        extra["stages"] = std::move(stages);
    } else {
        auto observer = [&](const SystemState&, const GradientIteration& it) {
            out.history.push_back(gradient_history_line(it).dump());
        };
        GradientRun run = cfg.algorithm == Algorithm::pgd
                              ? pgd_run(g, p.trace, pgd_config(cfg), observer)
                              : fista_run(g, p.trace, fista_config(cfg), observer);
        out.state = std::move(run.state);
        out.phases = std::move(run.phases);
        out.converged = run.converged;
        out.iterations = run.iterations;
        extra["pg_residual"] = run.pg_residual;
        extra["stalled"] = run.stalled;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const Violation viol = product_violation(out.state);
    out.energy = dirichlet_energy(out.state);
    out.violation_max = viol.max_abs;
    out.contours = extract_contours(out.state, *cfg.delta);

    double lo = out.state[0][0], hi = lo;
    for (const auto& f : out.state)
        for (double v : f.values()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }

    ojson& r = out.report;
    r["algorithm"] = to_string(cfg.algorithm);
    r["bc_id"] = cfg.bc;
    r["h"] = g.hx();
    r["iters"] = out.iterations;
    r["converged"] = out.converged;
    r["status"] = out.error ? "error" : (out.converged ? "converged" : "not_converged");
    r["error"] = out.error ? ojson(*out.error) : ojson(nullptr);
    r["final_energy"] = out.energy;
    r["final_violation_max"] = viol.max_abs;
    r["final_violation_l2"] = viol.l2;
    r["interior_max_product"] = interior_max_product(out.state);
    r["wall_time_seconds"] = cfg.deterministic ? ojson(nullptr) : ojson(wall);
    r["grid"] = {{"nx", g.nx()},
                 {"ny", g.ny()},
                 {"hx", g.hx()},
                 {"hy", g.hy()},
                 {"bounds", {g.bounds().x_min, g.bounds().x_max, g.bounds().y_min, g.bounds().y_max}}};
    r["energy_definition"] =
        "0.5 * sum over components and cells of |forward-difference gradient|^2 * hx * hy";
    r["trace_sup"] = sup_bound(p.trace);
    r["min_value"] = lo;
    r["max_value"] = hi;
    for (auto& [k, v] : extra.items()) r[k] = v;

    const RegionMeans means = region_means(out.state);
    ojson regions;
    regions["inner_half_width"] = means.inner_half_width;
    regions["layer_width"] = means.layer_width;
    const char* region_names[3] = {"inner_square", "boundary_layer", "outer"};
    for (int c = 0; c < 3; ++c) {
        ojson m;
        for (int k = 0; k < 3; ++k) m[region_names[k]] = means.mean[c][k];
        regions["mean_u" + std::to_string(c + 1)] = std::move(m);
    }
    r["regions"] = std::move(regions);
    r["contour_delta"] = out.contours.delta;
    r["contour_polylines"] = {out.contours.components[0].size(), out.contours.components[1].size(),
                              out.contours.components[2].size()};
    r["history_file"] = "history.jsonl";
    r["config"] = to_json(cfg);
    return out;
}

void write_artifacts(const RunOutcome& o, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ConfigError("cannot create output directory '" + dir + "'");
    const fs::path base(dir);
    for (int c = 0; c < 3; ++c)
        write_field_csv((base / ("u" + std::to_string(c + 1) + ".csv")).string(), o.state[c]);
    write_text_file((base / "report.json").string(), o.report.dump(2) + "\n");
    std::string hist;
    for (const auto& line : o.history) hist += line + "\n";
    write_text_file((base / "history.jsonl").string(), hist);
    write_text_file((base / "contours.svg").string(), render_svg(o.contours, o.grid));
    {
        std::ofstream os(base / "contours.csv", std::ios::binary);
        if (!os) throw ConfigError("cannot write " + (base / "contours.csv").string());
        write_contours_csv(os, o.contours);
    }
    if (o.phases) write_phases_csv((base / "phases.csv").string(), *o.phases);
}

std::string default_output_root() {
    const char* env = std::getenv("SEGSOLVE_OUT");
    return env && *env ? std::string(env) : std::string("segsolve_out");
}

}  // namespace segsolve
