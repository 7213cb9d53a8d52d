#include <doctest.h>

#include <cmath>
#include <random>

#include "segsolve/penalty.hpp"

using namespace segsolve;

namespace {

BoundaryTrace make_trace(const ScalarField& a, const ScalarField& b, const ScalarField& c) {
    return BoundaryTrace{{a, b, c}};
}

// 3x3 grid on [-1,1]^2, h = 1; boundary neighbours of the centre are the
// four edge midpoints.
struct Tiny {
    Grid g = unit_square_grid(3);
    std::array<double, 3> sums{};
    BoundaryTrace trace{{ScalarField(g), ScalarField(g), ScalarField(g)}};

    Tiny(const std::array<std::array<double, 4>, 3>& nsew) {
        std::array<ScalarField, 3> phi{ScalarField(g), ScalarField(g), ScalarField(g)};
        for (int c = 0; c < 3; ++c) {
            phi[c](1, 2) = nsew[c][0];
            phi[c](1, 0) = nsew[c][1];
            phi[c](2, 1) = nsew[c][2];
            phi[c](0, 1) = nsew[c][3];
            sums[c] = nsew[c][0] + nsew[c][1] + nsew[c][2] + nsew[c][3];
        }
        trace = BoundaryTrace{phi};
    }

    SystemState state(double a1, double a2, double a3) const {
        SystemState s(g);
        for (int c = 0; c < 3; ++c) s[c] = trace[c];
        s[0](1, 1) = a1;
        s[1](1, 1) = a2;
        s[2](1, 1) = a3;
        return s;
    }
};

bool within(const SystemState& s, double m) {
    for (const auto& f : s)
        for (double v : f.values())
            if (v < -1e-10 || v > m + 1e-10) return false;
    return true;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

BoundaryTrace boundary_random(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::array<ScalarField, 3> phi{ScalarField(g), ScalarField(g), ScalarField(g)};
    // segregated: one component active per boundary node
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.is_boundary(k)) phi[static_cast<std::size_t>(d(rng) * 3.0) % 3][k] = d(rng);
    return BoundaryTrace{phi};
}

}  // namespace

TEST_CASE("ladder and config validation") {
    PenaltyConfig cfg;
    const auto l = cfg.ladder();
    REQUIRE(l.size() == 3);
    CHECK(l[0] == 1e-2);
    CHECK(l[2] == 1e-4);

    cfg.epsilon_target = 1e-2;
    CHECK(cfg.ladder() == std::vector<double>{1e-2});
    cfg.epsilon_target = 3e-4;
    const auto m = cfg.ladder();
    CHECK(m.back() == 3e-4);
    for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i] < m[i - 1]);

    PenaltyConfig bad;
    bad.epsilon_start = 1e-5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = PenaltyConfig{};
    bad.continuation_factor = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = PenaltyConfig{};
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = PenaltyConfig{};
    bad.max_outer = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    for (auto s : {PenaltyScheme::picard, PenaltyScheme::gauss_seidel, PenaltyScheme::semi_implicit,
                   PenaltyScheme::phase_field})
        CHECK(parse_penalty_scheme(to_string(s)) == s);
}

TEST_CASE("picard single node closed form") {
    Tiny t({{{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}}});
    const SystemState s = t.state(1, 1, 1);
    const SystemState out = picard_step(s, t.trace, 1.0, 1.0).state;
    for (int c = 0; c < 3; ++c) CHECK(std::abs(out[c](1, 1) - 4.0 / 5.0) < 1e-12);

    Tiny u({{{0.3, 0.1, 0, 0.7}, {0, 0.5, 0.2, 0}, {0.9, 0, 0, 0.4}}});
    const double a1 = 0.4, a2 = 0.6, a3 = 0.2, eps = 0.05;
    const SystemState r = picard_step(u.state(a1, a2, a3), u.trace, eps, 1.0).state;
    CHECK(std::abs(r[0](1, 1) - u.sums[0] / (4.0 + (a2 * a3) * (a2 * a3) / eps)) < 1e-12);
    CHECK(std::abs(r[1](1, 1) - u.sums[1] / (4.0 + (a1 * a3) * (a1 * a3) / eps)) < 1e-12);
    CHECK(std::abs(r[2](1, 1) - u.sums[2] / (4.0 + (a1 * a2) * (a1 * a2) / eps)) < 1e-12);
}

TEST_CASE("gauss-seidel and semi-implicit single node sequence") {
    Tiny u({{{0.3, 0.1, 0, 0.7}, {0, 0.5, 0.2, 0}, {0.9, 0, 0, 0.4}}});
    const double a1 = 0.4, a2 = 0.6, a3 = 0.2, eps = 0.01;
    const double v1 = u.sums[0] / (4.0 + (a2 * a3) * (a2 * a3) / eps);
    const double v2 = u.sums[1] / (4.0 + a3 * a3 * (a1 * a1 + v1 * v1) / 2.0 / eps);
    const double v3 =
        u.sums[2] / (4.0 + ((a1 * a2) * (a1 * a2) + (v1 * v2) * (v1 * v2)) / 2.0 / eps);
    const SystemState s = u.state(a1, a2, a3);
    for (const SystemState& r :
         {gauss_seidel_step(s, u.trace, eps).state, semi_implicit_step(s, u.trace, eps).state}) {
        CHECK(std::abs(r[0](1, 1) - v1) < 1e-12);
        CHECK(std::abs(r[1](1, 1) - v2) < 1e-12);
        CHECK(std::abs(r[2](1, 1) - v3) < 1e-12);
    }
}

TEST_CASE("phase field single node closed form") {
    Tiny u({{{0.3, 0.1, 0, 0.7}, {0, 0.5, 0.2, 0}, {0.9, 0, 0, 0.4}}});
    const double a[3] = {0.4, 0.6, 0.2};
    for (double eps : {0.5, 0.01, 1e-4}) {
        const SystemState r = phase_field_step(u.state(a[0], a[1], a[2]), u.trace, eps).state;
        for (int c = 0; c < 3; ++c) {
            const double p = a[(c + 1) % 3] * a[(c + 2) % 3];
            const double w = p * p;
            const double k = 1.0 / (2.0 * eps);
            const double expect = std::max(0.0, (u.sums[c] - k * a[c] * w) / (4.0 + k * w));
            CHECK(std::abs(r[c](1, 1) - expect) < 1e-12);
        }
    }
}

TEST_CASE("degenerate inputs") {
    const Grid g = unit_square_grid(21);
    const BoundaryTrace tr = boundary_random(g, 11);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    SystemState s(g);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < g.size(); ++k) s[c][k] = g.is_boundary(k) ? tr[c][k] : d(rng);
    }

    SUBCASE("alpha = 0 returns the input") {
        CHECK(picard_step(s, tr, 1e-3, 0.0).state == s);
    }
    SUBCASE("damping interpolates the undamped step") {
        const SystemState full = picard_step(s, tr, 1e-3, 1.0).state;
        const SystemState half = picard_step(s, tr, 1e-3, 0.3).state;
        for (int c = 0; c < 3; ++c)
            for (std::size_t k = 0; k < g.size(); ++k)
                CHECK(half[c][k] == doctest::Approx(0.3 * full[c][k] + 0.7 * s[c][k]).epsilon(1e-15));
    }
    SUBCASE("u2 = 0 decouples u1 and u3") {
        SystemState z = s;
        z[1] = ScalarField(g);
        const BoundaryTrace t2 = make_trace(tr[0], ScalarField(g), tr[2]);
        const SystemState r = picard_step(z, t2, 1e-3, 1.0).state;
        CHECK(max_abs_diff(r[0], harmonic_extension(tr[0])) < 1e-9);
        CHECK(max_abs_diff(r[2], harmonic_extension(tr[2])) < 1e-9);
        const SystemState p = phase_field_step(z, t2, 1e-3).state;
        CHECK(max_abs_diff(p[0], harmonic_extension(tr[0])) < 1e-9);
        CHECK(max_abs_diff(p[2], harmonic_extension(tr[2])) < 1e-9);
    }
    SUBCASE("gauss-seidel with u2 = u3 = 0 and zero traces") {
        SystemState z = s;
        z[1] = ScalarField(g);
        z[2] = ScalarField(g);
        const BoundaryTrace t1 = make_trace(tr[0], ScalarField(g), ScalarField(g));
        const SystemState r = gauss_seidel_step(z, t1, 1e-3).state;
        CHECK(max_abs_diff(r[0], harmonic_extension(tr[0])) < 1e-9);
        for (double v : r[1].values()) CHECK(v == 0.0);
        for (double v : r[2].values()) CHECK(v == 0.0);
    }
    SUBCASE("zero data stays zero") {
        const SystemState zero(g);
        const BoundaryTrace zt = make_trace(ScalarField(g), ScalarField(g), ScalarField(g));
        CHECK(semi_implicit_step(zero, zt, 1e-3).state == zero);
        CHECK(phase_field_step(zero, zt, 1e-3).state == zero);
    }
    SUBCASE("semi-implicit coincides with undamped gauss-seidel") {
        CHECK(semi_implicit_step(s, tr, 1e-3).state == gauss_seidel_step(s, tr, 1e-3).state);
    }
    SUBCASE("argument errors") {
        CHECK_THROWS_AS(picard_step(s, tr, 0.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(picard_step(s, tr, 1e-3, 1.5), std::invalid_argument);
        CHECK_THROWS_AS(gauss_seidel_step(s, tr, 1e-3, {}, 0.0), std::invalid_argument);
        const BoundaryTrace other = boundary_random(unit_square_grid(11), 1);
        CHECK_THROWS_AS(picard_step(s, other, 1e-3, 0.5), std::invalid_argument);
    }
}

TEST_CASE("every step stays in the order interval") {
    const Grid g = unit_square_grid(25);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const BoundaryTrace tr = boundary_random(g, seed);
        const double m = sup_bound(tr);
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> d(0.0, m);
        SystemState s(g);
        for (int c = 0; c < 3; ++c)
            for (std::size_t k = 0; k < g.size(); ++k) s[c][k] = g.is_boundary(k) ? tr[c][k] : d(rng);
        for (double eps : {1e-1, 1e-3, 1e-6}) {
            CHECK(within(picard_step(s, tr, eps, 0.5).state, m));
            CHECK(within(gauss_seidel_step(s, tr, eps).state, m));
            CHECK(within(gauss_seidel_step(s, tr, eps, {}, 0.5).state, m));
            CHECK(within(semi_implicit_step(s, tr, eps).state, m));
            CHECK(within(phase_field_step(s, tr, eps).state, m));
        }
    }
}

TEST_CASE("run with a vanishing third trace") {
    const Grid g = unit_square_grid(31);
    std::array<ScalarField, 3> phi{ScalarField(g), ScalarField(g), ScalarField(g)};
    for (std::size_t i = 0; i < g.nx(); ++i) {
        phi[0](i, 0) = 1.0 - std::abs(g.x(i));
        phi[1](i, g.ny() - 1) = 0.5 * (1.0 - g.x(i) * g.x(i));
    }
    const BoundaryTrace tr{phi};
    for (auto scheme : {PenaltyScheme::picard, PenaltyScheme::gauss_seidel, PenaltyScheme::semi_implicit,
                        PenaltyScheme::phase_field}) {
        PenaltyConfig cfg;
        cfg.scheme = scheme;
        const PenaltyRun run = run_penalty(g, tr, cfg);
        CHECK(run.converged);
        for (const auto& st : run.stages) CHECK(st.iterations <= 2);
        for (double v : run.state[2].values()) CHECK(v == 0.0);
        CHECK(max_abs_diff(run.state[0], harmonic_extension(tr[0])) < 1e-9);
        CHECK(max_abs_diff(run.state[1], harmonic_extension(tr[1])) < 1e-9);
    }
}

TEST_CASE("ex41 ladder: product norm falls with epsilon, fixed point, determinism") {
    const Grid g = unit_square_grid(41);
    const BoundaryTrace tr = evaluate_bc(builtin_config(BcId::ex41), g);
    PenaltyConfig cfg;
    cfg.epsilon_target = 1e-5;
    std::vector<double> observed_eps;
    const PenaltyRun run = run_penalty(g, tr, cfg, [&](const SystemState& s, const PenaltyIteration& it) {
        CHECK(within(s, sup_bound(tr)));
        if (observed_eps.empty() || observed_eps.back() != it.stage_epsilon)
            observed_eps.push_back(it.stage_epsilon);
    });
    REQUIRE(!run.error);
    CHECK(run.converged);
    REQUIRE(run.stages.size() == 4);
    CHECK(observed_eps == cfg.ladder());
    for (std::size_t i = 1; i < run.stages.size(); ++i)
        CHECK(run.stages[i].product_l2 <= 1.05 * run.stages[i - 1].product_l2);
    CHECK(run.history.size() ==
          run.stages[0].iterations + run.stages[1].iterations + run.stages[2].iterations +
              run.stages[3].iterations);

    const PenaltyRun again = run_penalty(g, tr, cfg);
    REQUIRE(again.history.size() == run.history.size());
    for (std::size_t i = 0; i < run.history.size(); ++i) {
        CHECK(again.history[i].energy == run.history[i].energy);
        CHECK(again.history[i].step_norm == run.history[i].step_norm);
    }
    CHECK(again.state == run.state);

    PenaltyConfig gs = cfg;
    gs.scheme = PenaltyScheme::gauss_seidel;
    gs.epsilon_target = 1e-3;
    const PenaltyRun gr = run_penalty(g, tr, gs);
    REQUIRE(gr.converged);
    const SystemState next = gauss_seidel_step(gr.state, tr, 1e-3).state;
    CHECK(max_l2_diff(next, gr.state) < 1e-8);
}
