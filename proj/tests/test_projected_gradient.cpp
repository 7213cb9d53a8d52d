#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "segsolve/projected_gradient.hpp"

using namespace segsolve;

namespace {

BoundaryTrace zero_trace(const Grid& g) {
    return BoundaryTrace{{ScalarField(g), ScalarField(g), ScalarField(g)}};
}

// u1 = c + delta * (top Dirichlet eigenmode), u2 = u3 = 0, with u1 = c on the
// boundary. A gradient step scales the mode by (1 - alpha lambda) and the
// projection leaves it alone, so the candidate energy is
// (1 - alpha lambda)^2 times the starting energy.
struct ModeSetup {
    Grid g = unit_square_grid(17);
    double lambda = 0.0;
    SystemState y{g};
    BoundaryTrace trace = zero_trace(g);

    ModeSetup() {
        const std::size_t p = g.nx() - 2;
        const double m = static_cast<double>(g.nx() - 1);
        ScalarField mode = sample(g, [&](double x, double yy) {
            return std::sin(p * std::numbers::pi * (x + 1.0) / 2.0) *
                   std::sin(p * std::numbers::pi * (yy + 1.0) / 2.0);
        });
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.is_boundary(k)) mode[k] = 0.0;
        const double s = std::sin(p * std::numbers::pi / (2.0 * m));
        lambda = 2.0 * 4.0 / (g.hx() * g.hx()) * s * s;
        const double c = 1.0, delta = 0.01;
        ScalarField u1(g, c);
        for (std::size_t k = 0; k < g.size(); ++k) u1[k] += delta * mode[k];
        y = SystemState(u1, ScalarField(g), ScalarField(g));
        std::array<ScalarField, 3> phi{ScalarField(g), ScalarField(g), ScalarField(g)};
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.is_boundary(k)) phi[0][k] = c;
        trace = BoundaryTrace{phi};
    }

    FistaConfig cfg(double alpha0, double alpha_min) const {
        FistaConfig f;
        f.alpha0 = alpha0;
        f.alpha_min = alpha_min;
        f.rho = 0.5;
        f.eta = 0.0;
        f.tau = 0.0;
        return f;
    }
};

bool pinned(const SystemState& s, const BoundaryTrace& tr) {
    const Grid& g = s.grid();
    for (int c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.is_boundary(k) && s[c][k] != tr[c][k]) return false;
    return true;
}

}  // namespace

TEST_CASE("momentum recursion") {
    MomentumState m;
    CHECK(m.advance() == 0.0);
    CHECK(m.t == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    double prev = m.t;
    for (int k = 2; k <= 10000; ++k) {
        const double beta = m.advance();
        REQUIRE(m.t > prev);
        REQUIRE(m.t >= (k + 2) / 2.0);
        REQUIRE(beta >= 0.0);
        REQUIRE(beta < 1.0);
        prev = m.t;
    }
    m.restart();
    CHECK(m.t == 1.0);
}

TEST_CASE("config resolution") {
    const Grid g = unit_square_grid(101);
    const double h2 = g.hx() * g.hx();
    const PgdConfig p = PgdConfig{}.resolved(g);
    CHECK(p.alpha == doctest::Approx(0.1 * h2).epsilon(1e-15));
    const FistaConfig f = FistaConfig{}.resolved(g);
    CHECK(f.alpha0 == doctest::Approx(0.03 * h2).epsilon(1e-15));
    CHECK(f.alpha_min == doctest::Approx(1e-5 * h2).epsilon(1e-15));
    CHECK(f.tau == 1e-10);
    CHECK(f.max_iters == 20000);
    CHECK(p.max_iters == 50000);

    PgdConfig edge;
    edge.alpha = 0.125 * h2;
    CHECK_NOTHROW(edge.resolved(g));
    edge.alpha = 0.126 * h2;
    CHECK_THROWS_AS(edge.resolved(g), std::invalid_argument);
    edge.alpha = -1.0;
    CHECK_THROWS_AS(edge.resolved(g), std::invalid_argument);

    FistaConfig bad;
    bad.alpha0 = 1e-6;
    bad.alpha_min = 1e-5;
    CHECK_THROWS_AS(bad.resolved(g), std::invalid_argument);
    bad = FistaConfig{};
    bad.rho = 1.0;
    CHECK_THROWS_AS(bad.resolved(g), std::invalid_argument);
    bad = FistaConfig{};
    bad.eta = -0.1;
    CHECK_THROWS_AS(bad.resolved(g), std::invalid_argument);
}

TEST_CASE("zero data converges at once") {
    const Grid g = unit_square_grid(21);
    const BoundaryTrace tr = zero_trace(g);
    const GradientRun p = pgd_run(g, tr, {});
    CHECK(p.converged);
    CHECK(p.iterations == 1);
    CHECK(dirichlet_energy(p.state) == 0.0);
    const GradientRun f = fista_run(g, tr, {});
    CHECK(f.converged);
    CHECK(f.iterations == 1);
    CHECK(f.history.at(0).energy == 0.0);
}

TEST_CASE("backtracking") {
    const ModeSetup s;
    const double e0 = dirichlet_energy(s.y);
    REQUIRE(e0 > 0.0);
    const PhaseAssignment ph(s.g);
    const BacktrackContext ctx{s.y, e0, ph, s.trace};

    SUBCASE("exact eigenmode") {
        const SystemState lap(apply_laplacian(s.y[0]), ScalarField(s.g), ScalarField(s.g));
        for (std::size_t k = 0; k < s.g.size(); ++k)
            if (!s.g.is_boundary(k))
                REQUIRE(std::abs(lap[0][k] + s.lambda * (s.y[0][k] - 1.0)) < 1e-9);
    }
    SUBCASE("accepted without shrinking") {
        const BacktrackResult r = backtrack(s.y, 1.0 / s.lambda, s.cfg(1.0 / s.lambda, 1e-9), ctx);
        CHECK(r.shrinks == 0);
        CHECK(!r.restart);
        CHECK(r.alpha == 1.0 / s.lambda);
        CHECK(r.energy <= 1e-12 * e0);
    }
    SUBCASE("exactly two shrinks") {
        // factors (1 - alpha lambda)^2: 25, 4, then 0.25 at rho^2 alpha0
        const double a0 = 6.0 / s.lambda;
        const BacktrackResult r = backtrack(s.y, a0, s.cfg(a0, 1e-9), ctx);
        CHECK(r.shrinks == 2);
        CHECK(!r.restart);
        CHECK(r.alpha == doctest::Approx(0.25 * a0).epsilon(1e-15));
        CHECK(r.energy == doctest::Approx(0.25 * e0).epsilon(1e-9));
        CHECK(pinned(r.candidate.state, s.trace));
    }
    SUBCASE("floor reached flags a restart") {
        const double a0 = 6.0 / s.lambda;
        const BacktrackResult r = backtrack(s.y, a0, s.cfg(a0, 3.0 / s.lambda), ctx);
        CHECK(r.restart);
        CHECK(r.shrinks == 1);
        CHECK(r.alpha == 3.0 / s.lambda);
    }
}

TEST_CASE("first FISTA step is a plain projected gradient step") {
    const Grid g = unit_square_grid(41);
    const BoundaryTrace tr = evaluate_bc(builtin_config(BcId::bc4), g);
    FistaConfig f;
    f.eta = 0.0;
    f.tau = 0.0;
    f.max_iters = 1;
    const GradientRun fr = fista_run(g, tr, f);
    REQUIRE(fr.history.size() == 1);
    CHECK(fr.history[0].shrinks == 0);
    PgdConfig p;
    p.alpha = f.resolved(g).alpha0;
    p.max_iters = 1;
    const GradientRun pr = pgd_run(g, tr, p);
    CHECK(pr.state == fr.state);
}

TEST_CASE("feasibility, pinning and monotone energy on a benchmark trace") {
    const Grid g = unit_square_grid(31);
    for (BcId id : {BcId::bc2, BcId::bc7, BcId::ex41}) {
        const BoundaryTrace tr = evaluate_bc(builtin_config(id), g);
        double last = std::numeric_limits<double>::infinity();
        bool ok = true;
        auto watch = [&](const SystemState& s, const GradientIteration& it) {
            ok = ok && interior_max_product(s) == 0.0 && pinned(s, tr);
            // PGD may rise briefly while phases settle
            if (it.iter > 10) ok = ok && it.energy <= last;
            last = it.energy;
        };
        const GradientRun pr = pgd_run(g, tr, {}, watch);
        CHECK(ok);
        CHECK(pr.converged);
        CHECK(pr.pg_residual >= 0.0);

        last = std::numeric_limits<double>::infinity();
        const GradientRun fr = fista_run(g, tr, {}, watch);
        CHECK(ok);
        CHECK(fr.converged);
        CHECK(!fr.stalled);
        for (std::size_t i = 1; i < fr.history.size(); ++i)
            CHECK(fr.history[i].energy <= fr.history[i - 1].energy);
    }
}
