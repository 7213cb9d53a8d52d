#include "segsolve/cli.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "segsolve/projection.hpp"

namespace segsolve {

namespace fs = std::filesystem;

namespace {

std::string run_dir_name(const RunConfig& c) {
    return to_string(c.algorithm) + "_" + c.bc + "_n" + std::to_string(c.n);
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    RunConfig resolved;
    try {
        resolved = cfg.resolved();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    const std::string dir =
        cfg.output.empty() ? (fs::path(default_output_root()) / run_dir_name(cfg)).string() : cfg.output;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        err << "error: cannot create output directory '" << dir << "'\n";
        return 1;
    }

    const RunOutcome o = execute_run(resolved);
    try {
        write_artifacts(o, dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    out << to_string(resolved.algorithm) << ' ' << resolved.bc << " n=" << resolved.n << ": "
        << o.report["status"].get<std::string>() << " after " << o.iterations
        << " iterations, energy " << format_real(o.energy) << ", max violation "
        << format_real(o.violation_max) << '\n'
        << "artifacts in " << dir << '\n';
    if (o.error) err << "solver failure: " << *o.error << '\n';
    return o.converged ? 0 : 2;
}

bool BenchSummary::all_converged() const {
    for (const auto& r : rows)
        if (r.status != "converged") return false;
    return true;
}

BenchSummary run_bench(const std::vector<Algorithm>& algorithms, const RunConfig& base,
                       const std::string& dir) {
    if (algorithms.empty()) throw ConfigError("bench needs at least one algorithm");
    std::vector<RunConfig> configs;
    for (BcId id : benchmark_ids())
        for (Algorithm a : algorithms) {
            RunConfig c = base;
            c.algorithm = a;
            c.bc = to_string(id);
            c.bc_file.clear();
            configs.push_back(c.resolved());
        }

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");

    std::vector<std::optional<RunOutcome>> outcomes(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex fail_mutex;
    std::optional<std::string> write_failure;
    auto worker = [&]() {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            outcomes[k] = execute_run(configs[k]);
            try {
                write_artifacts(*outcomes[k], (fs::path(dir) / to_string(configs[k].algorithm) /
                                               configs[k].bc).string());
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (!write_failure) write_failure = e.what();
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(base.jobs, configs.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (write_failure) throw ConfigError(*write_failure);

    BenchSummary summary;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const RunOutcome& o = *outcomes[k];
        BenchRow row{configs[k].bc, configs[k].algorithm,
                     o.report["status"].get<std::string>(), o.iterations, o.energy,
                     o.violation_max, std::nullopt};
        if (!o.report["wall_time_seconds"].is_null())
            row.wall_time = o.report["wall_time_seconds"].get<double>();
        summary.rows.push_back(std::move(row));
    }

    std::ostringstream csv;
    csv << "bc,algorithm,status,iterations,final_energy,final_violation_max,wall_time_seconds\n";
    for (const auto& r : summary.rows)
        csv << r.bc << ',' << to_string(r.algorithm) << ',' << r.status << ',' << r.iterations << ','
            << format_real(r.energy) << ',' << format_real(r.violation_max) << ','
            << (r.wall_time ? format_real(*r.wall_time) : std::string()) << '\n';
    write_text_file((fs::path(dir) / "summary.csv").string(), csv.str());

    const Grid grid = unit_square_grid(base.n);
    for (Algorithm a : algorithms) {
        std::vector<SheetTile> tiles;
        for (std::size_t k = 0; k < configs.size(); ++k)
            if (configs[k].algorithm == a) tiles.push_back({configs[k].bc, outcomes[k]->contours});
        write_text_file((fs::path(dir) / ("sheet_" + to_string(a) + ".svg")).string(),
                        render_svg_sheet(tiles, grid, 3));
    }
    return summary;
}

int cmd_bench(const std::vector<Algorithm>& algorithms, const RunConfig& base,
              const std::string& dir, std::ostream& out, std::ostream& err) {
    BenchSummary s;
    try {
        s = run_bench(algorithms, base, dir);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& r : s.rows)
        out << r.bc << ' ' << to_string(r.algorithm) << ": " << r.status << " (" << r.iterations
            << " iterations, energy " << format_real(r.energy) << ")\n";
    out << "summary in " << (fs::path(dir) / "summary.csv").string() << '\n';
    return s.all_converged() ? 0 : 2;
}

int cmd_project_selftest(std::size_t count, std::uint64_t seed, std::ostream& out,
                         std::ostream& err) {
    if (count == 0) {
        err << "error: --count must be at least 1\n";
        return 1;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 2.0);
    for (std::size_t n = 0; n < count; ++n) {
        const Vec3 v{dist(rng), dist(rng), dist(rng)};
        const PointProjection p = project_point(v);
        const FaceOracle o = face_enumeration(v);
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) d2 += (v[i] - p.value[i]) * (v[i] - p.value[i]);
        if (std::abs(d2 - o.best_dist2) > 1e-12 || p.face != o.best_face) {
            err << "mismatch at vector " << n << ": (" << format_real(v[0]) << ", "
                << format_real(v[1]) << ", " << format_real(v[2]) << ") projection face " << p.face
                << " dist2 " << format_real(d2) << ", enumeration face " << o.best_face
                << " dist2 " << format_real(o.best_dist2) << '\n';
            return 2;
        }
        if (count == 1)
            out << "vector (" << format_real(v[0]) << ", " << format_real(v[1]) << ", "
                << format_real(v[2]) << "): zeroed component k*=" << p.face << '\n';
    }
    out << "projection matches face enumeration on " << count << " vectors (seed " << seed << ")\n";
    return 0;
}

int cmd_contours(const std::string& fields_dir, std::optional<double> delta,
                 const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const fs::path base(fields_dir);
    try {
        if (!delta) {
            std::ifstream is(base / "report.json");
            if (!is) throw ConfigError("no --delta given and no report.json in " + fields_dir);
            const auto rep = nlohmann::json::parse(is);
            if (!rep.contains("contour_delta") || !rep["contour_delta"].is_number())
                throw ConfigError("report.json has no contour_delta");
            delta = rep["contour_delta"].get<double>();
        }
        if (!(*delta > 0.0)) throw ConfigError("contour level delta must be positive");
        ScalarField u1 = read_field_csv((base / "u1.csv").string());
        ScalarField u2 = read_field_csv((base / "u2.csv").string());
        ScalarField u3 = read_field_csv((base / "u3.csv").string());
        const SystemState state(std::move(u1), std::move(u2), std::move(u3));
        const ContourSet cs = extract_contours(state, *delta);

        const std::string dir = out_dir.empty() ? fields_dir : out_dir;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
        write_text_file((fs::path(dir) / "contours.svg").string(), render_svg(cs, state.grid()));
        std::ostringstream csv;
        write_contours_csv(csv, cs);
        write_text_file((fs::path(dir) / "contours.csv").string(), csv.str());
        out << cs.polyline_count() << " polylines at delta " << format_real(*delta) << " written to "
            << dir << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

namespace {

// Flags shared by solve and bench; only values actually given override the
// config file.
struct ParamFlags {
    std::string bc, bc_file;
    std::size_t n = 0;
    double eps = 0, eps_start = 0, eps_factor = 0, alpha = 0, damping = 0, tol = 0, delta = 0;
    std::size_t max_iters = 0, jobs = 0;
    std::string out, config;
    std::uint64_t seed = 0;
    bool deterministic = false;
    std::vector<CLI::Option*> opts;

    void add(CLI::App* app, bool with_bc) {
        if (with_bc) {
            opts.push_back(app->add_option("--bc", bc, "boundary configuration: bc1..bc9, ex41, custom"));
            opts.push_back(app->add_option("--bc-file", bc_file, "boundary CSV for --bc custom"));
        }
        opts.push_back(app->add_option("--n", n, "grid points per axis"));
        opts.push_back(app->add_option("--eps", eps, "target penalty epsilon"));
        opts.push_back(app->add_option("--eps-start", eps_start, "first epsilon of the continuation ladder"));
        opts.push_back(app->add_option("--eps-factor", eps_factor, "continuation factor in (0,1)"));
        opts.push_back(app->add_option("--alpha", alpha, "gradient step (PGD) or initial step (FISTA)"));
        opts.push_back(app->add_option("--damping", damping, "Picard damping in (0,1]"));
        opts.push_back(app->add_option("--tol", tol, "L2 step tolerance"));
        opts.push_back(app->add_option("--max-iters", max_iters, "iteration cap (outer iterations per stage for penalty runs)"));
        opts.push_back(app->add_option("--delta", delta, "contour level"));
        opts.push_back(app->add_option("--out", out, "output directory"));
        opts.push_back(app->add_option("--jobs", jobs, "concurrent runs (bench)"));
        opts.push_back(app->add_option("--seed", seed, "seed recorded in the report"));
        opts.push_back(app->add_flag("--deterministic", deterministic, "omit wall times so reruns are byte-identical"));
        app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    }

    bool given(const std::string& name) const {
        for (auto* o : opts)
            if (o->check_name(name)) return o->count() > 0;
        return false;
    }

    RunConfig build(RunConfig cfg) const {
        if (!config.empty()) {
            std::ifstream is(config);
            if (!is) throw ConfigError("cannot read config file '" + config + "'");
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(is);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
            }
            // A report.json can be fed back directly.
            if (j.is_object() && j.contains("config") && j["config"].is_object()) j = j["config"];
            merge_json(cfg, j);
        }
        if (given("--bc")) cfg.bc = bc;
        if (given("--bc-file")) cfg.bc_file = bc_file;
        if (given("--n")) cfg.n = n;
        if (given("--eps")) cfg.epsilon = eps;
        if (given("--eps-start")) cfg.epsilon_start = eps_start;
        if (given("--eps-factor")) cfg.epsilon_factor = eps_factor;
        if (given("--alpha")) cfg.alpha = alpha;
        if (given("--damping")) cfg.damping = damping;
        if (given("--tol")) cfg.tol = tol;
        if (given("--max-iters")) cfg.max_iters = max_iters;
        if (given("--delta")) cfg.delta = delta;
        if (given("--out")) cfg.output = out;
        if (given("--jobs")) cfg.jobs = jobs;
        if (given("--seed")) cfg.seed = seed;
        if (deterministic) cfg.deterministic = true;
        return cfg;
    }
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solvers for three-component elliptic systems under partial segregation"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "run one solver on one boundary configuration");
    std::string algo;
    ParamFlags solve_flags;
    auto* algo_opt = solve->add_option("--algo", algo,
                                       "penalty-picard, penalty-gs, penalty-semi, "
                                       "penalty-phasefield, pgd, fista");
    solve_flags.add(solve, true);

    auto* bench = app.add_subcommand("bench", "run bc1..bc9 for each listed algorithm");
    std::string algos;
    ParamFlags bench_flags;
    bench->add_option("--algos,--algo", algos, "comma-separated algorithm list")->required();
    bench_flags.add(bench, false);

    auto* selftest = app.add_subcommand("project-selftest", "compare the projection with face enumeration");
    long long count = 100000;
    std::uint64_t seed = 12345;
    selftest->add_option("--count", count, "number of random vectors");
    selftest->add_option("--seed", seed, "random seed");

    auto* contours = app.add_subcommand("contours", "re-extract contours from saved fields");
    std::string fields_dir, contour_out;
    double delta = 0.0;
    contours->add_option("fields", fields_dir, "directory with u1.csv, u2.csv, u3.csv")->required();
    auto* delta_opt = contours->add_option("--delta", delta, "contour level");
    contours->add_option("--out", contour_out, "output directory (default: the fields directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve) {
            RunConfig base;
            RunConfig cfg = solve_flags.build(base);
            if (algo_opt->count() > 0) {
                const auto a = parse_algorithm(algo);
                if (!a) throw ConfigError("unknown algorithm '" + algo + "'");
                cfg.algorithm = *a;
            }
            return cmd_solve(cfg, out, err);
        }
        if (*bench) {
            std::vector<Algorithm> list;
            for (const auto& name : split_list(algos)) {
                const auto a = parse_algorithm(name);
                if (!a) throw ConfigError("unknown algorithm '" + name + "'");
                list.push_back(*a);
            }
            if (list.empty()) throw ConfigError("bench needs at least one algorithm");
            RunConfig cfg = bench_flags.build(RunConfig{});
            const std::string dir = cfg.output.empty()
                                        ? (fs::path(default_output_root()) / "bench").string()
                                        : cfg.output;
            return cmd_bench(list, cfg, dir, out, err);
        }
        if (*selftest) {
            if (count < 1) {
                err << "error: --count must be at least 1\n";
                return 1;
            }
            return cmd_project_selftest(static_cast<std::size_t>(count), seed, out, err);
        }
        if (*contours) {
            return cmd_contours(fields_dir, delta_opt->count() ? std::optional<double>(delta) : std::nullopt,
                                contour_out, out, err);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace segsolve
