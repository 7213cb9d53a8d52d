#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "segsolve/grid.hpp"

using namespace segsolve;

namespace {

// Independent forward-difference cell sum, written out without the library's
// indexing helpers.
double energy_oracle(const std::vector<double>& v, std::size_t nx, std::size_t ny, double hx,
                     double hy) {
    double e = 0.0;
    for (std::size_t j = 0; j + 1 < ny; ++j)
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double gx = (v[j * nx + i + 1] - v[j * nx + i]) / hx;
            const double gy = (v[(j + 1) * nx + i] - v[j * nx + i]) / hy;
            e += 0.5 * (gx * gx + gy * gy) * hx * hy;
        }
    return e;
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
    return f;
}

}  // namespace

TEST_CASE("build_grid spacing and partition") {
    const Grid g3 = build_grid(3, 3, Bounds{});
    CHECK(g3.hx() == 1.0);
    CHECK(g3.hy() == 1.0);
    CHECK(g3.interior_size() == 1);
    CHECK_FALSE(g3.is_boundary(1, 1));

    const Grid g201 = build_grid(201, 201, Bounds{});
    CHECK(g201.hx() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(g201.hy() == doctest::Approx(0.01).epsilon(1e-14));
    const Grid g401 = build_grid(401, 401, Bounds{});
    CHECK(g401.hx() == doctest::Approx(0.005).epsilon(1e-14));

    std::size_t boundary = 0;
    for (std::size_t k = 0; k < g201.size(); ++k) boundary += g201.is_boundary(k);
    CHECK(boundary + g201.interior_size() == g201.size());
    CHECK(boundary == 4 * 200);
    CHECK(g201.x(0) == -1.0);
    CHECK(g201.x(200) == 1.0);
    CHECK(g201.x(100) == 0.0);
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(2, 5, Bounds{}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(5, 2, Bounds{}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(5, 5, Bounds{1.0, 1.0, -1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(5, 5, Bounds{-1.0, 1.0, 2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("apply_laplacian on polynomials") {
    const Grid g = build_grid(17, 13, Bounds{-1.0, 2.0, -0.5, 1.5});
    const ScalarField c = sample(g, [](double, double) { return 3.25; });
    const ScalarField lin = sample(g, [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; });
    const ScalarField quad = sample(g, [](double x, double) { return x * x; });
    const ScalarField lc = apply_laplacian(c), ll = apply_laplacian(lin), lq = apply_laplacian(quad);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if (g.is_boundary(i, j)) {
                CHECK(lq(i, j) == 0.0);
                continue;
            }
            CHECK(lc(i, j) == 0.0);
            CHECK(std::abs(ll(i, j)) < 1e-10);
            CHECK(lq(i, j) == doctest::Approx(2.0).epsilon(1e-10));
        }
}

TEST_CASE("apply_laplacian is linear") {
    std::mt19937_64 rng(7);
    const Grid g = unit_square_grid(21);
    const ScalarField f = random_field(g, rng), h = random_field(g, rng);
    const double a = 0.7, b = -1.3;
    ScalarField comb(g);
    for (std::size_t k = 0; k < g.size(); ++k) comb[k] = a * f[k] + b * h[k];
    const ScalarField lf = apply_laplacian(f), lh = apply_laplacian(h), lc = apply_laplacian(comb);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double expect = a * lf[k] + b * lh[k];
        CHECK(std::abs(lc[k] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
}

TEST_CASE("dirichlet_energy") {
    const Grid g = unit_square_grid(101);
    SystemState s(g);
    for (auto& f : s)
        for (double& v : f.values()) v = 0.4;
    CHECK(dirichlet_energy(s) == 0.0);

    SystemState lin(sample(g, [](double x, double) { return x; }), ScalarField(g), ScalarField(g));
    const std::vector<double> v(lin[0].values().begin(), lin[0].values().end());
    const double oracle = energy_oracle(v, g.nx(), g.ny(), g.hx(), g.hy());
    CHECK(dirichlet_energy(lin) == doctest::Approx(oracle).epsilon(1e-13));
    // Cells cover the whole square, so the forward-difference sum is exact here.
    CHECK(oracle == doctest::Approx(2.0).epsilon(1e-12));

    SystemState doubled = lin;
    for (double& x : doubled[0].values()) x *= 2.0;
    CHECK(dirichlet_energy(doubled) == doctest::Approx(4.0 * dirichlet_energy(lin)).epsilon(1e-14));

    std::mt19937_64 rng(11);
    SystemState r(random_field(g, rng), random_field(g, rng), random_field(g, rng));
    CHECK(dirichlet_energy(r) > 0.0);
    double total = 0.0;
    for (const auto& f : r) {
        const std::vector<double> vv(f.values().begin(), f.values().end());
        total += energy_oracle(vv, g.nx(), g.ny(), g.hx(), g.hy());
    }
    CHECK(dirichlet_energy(r) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("product_violation") {
    const Grid g = unit_square_grid(11);
    std::mt19937_64 rng(3);
    SystemState zero3(random_field(g, rng), random_field(g, rng), ScalarField(g));
    const Violation z = product_violation(zero3);
    CHECK(z.l2 == 0.0);
    CHECK(z.max_abs == 0.0);

    SystemState ones(ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g, 1.0));
    const Violation o = product_violation(ones);
    CHECK(o.l2 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(o.max_abs == 1.0);
    CHECK(interior_max_product(ones) == 1.0);
}

TEST_CASE("region_mean") {
    const Grid g = unit_square_grid(31);
    RegionMask all(g, std::vector<bool>(g.size(), true));
    CHECK(region_mean(ScalarField(g, 2.5), all) == doctest::Approx(2.5).epsilon(1e-15));
    const ScalarField x = sample(g, [](double xx, double) { return xx; });
    CHECK(std::abs(region_mean(x, all)) < 1e-14);
    RegionMask none(g, std::vector<bool>(g.size(), false));
    CHECK(none.count() == 0);
    CHECK_THROWS_AS(region_mean(x, none), std::invalid_argument);
}

TEST_CASE("l2_diff") {
    const Grid g = unit_square_grid(5);
    const ScalarField a(g, 1.0), b(g, 0.0);
    CHECK(l2_diff(a, a) == 0.0);
    CHECK(l2_diff(a, b) == doctest::Approx(2.0).epsilon(1e-15));

    std::mt19937_64 rng(5);
    const ScalarField p = random_field(g, rng), q = random_field(g, rng);
    // Trapezoidal weights on the 5x5 grid of [-1,1]^2, h = 0.5.
    double sum = 0.0;
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) {
            const double wx = (i == 0 || i == 4) ? 0.25 : 0.5;
            const double wy = (j == 0 || j == 4) ? 0.25 : 0.5;
            const double d = p[j * 5 + i] - q[j * 5 + i];
            sum += d * d * wx * wy;
        }
    CHECK(l2_diff(p, q) == doctest::Approx(std::sqrt(sum)).epsilon(1e-14));

    const ScalarField other(unit_square_grid(7), 0.0);
    CHECK_THROWS_AS(l2_diff(a, other), std::invalid_argument);
}

TEST_CASE("field CSV round trip") {
    const Grid g = build_grid(7, 5, Bounds{-1.0, 1.0, 0.0, 2.0});
    const ScalarField f = sample(g, [](double x, double y) { return std::sin(3.0 * x) * y + 1.0 / 3.0; });
    const auto path = std::filesystem::temp_directory_path() / "segsolve_test_field.csv";
    write_field_csv(path.string(), f);
    const ScalarField back = read_field_csv(path.string());
    CHECK(back.grid() == g);
    CHECK(back == f);
    std::filesystem::remove(path);

    std::ostringstream os;
    write_field_csv(os, f);
    CHECK(os.str().rfind("x,y,value\n", 0) == 0);
}

TEST_CASE("SystemState rejects mixed grids") {
    CHECK_THROWS_AS(SystemState(ScalarField(unit_square_grid(5)), ScalarField(unit_square_grid(5)),
                                ScalarField(unit_square_grid(6))),
                    std::invalid_argument);
}
