#include <doctest.h>

#include <cmath>

#include "pmlab/geometry.hpp"
#include "pmlab/quadrature.hpp"

using namespace pmlab;

namespace {

ChartGrid chart_1d(int nt, double t_lo, double t_hi) {
    ChartGrid c;
    c.n = 1;
    c.nx = {1, 1};
    c.dx = 1.0;
    c.nt = nt;
    c.t_lo = t_lo;
    c.dt = (t_hi - t_lo) / (nt - 1);
    return c;
}

ChartGrid chart_2d(int nx, double lo, double hi, int nt, double T) {
    ChartGrid c;
    c.n = 2;
    c.nx = {nx, 1};
    c.lo = {lo, 0.0};
    c.dx = (hi - lo) / (nx - 1);
    c.nt = nt;
    c.t_lo = 0.0;
    c.dt = T / (nt - 1);
    return c;
}

// independent half-derivative evaluation: adaptive quadrature with the
// singular part subtracted analytically
double half_derivative_oracle(const std::function<double(double)>& psi, double t, double a,
                              double b) {
    double eps = 1e-7;
    double d1 = (psi(t + eps) - psi(t - eps)) / (2 * eps);
    double d2 = (psi(t + eps) - 2 * psi(t) + psi(t - eps)) / (eps * eps);
    auto smooth = [&](double s) {
        double u = s - t;
        if (std::abs(u) < 1e-14) return 0.0;
        return (psi(s) - psi(t) - d1 * u - 0.5 * d2 * u * u) / std::pow(std::abs(u), 1.5);
    };
    double v = adaptive_simpson(smooth, a, t, 1e-10) + adaptive_simpson(smooth, t, b, 1e-10);
    // analytic pieces of the subtracted expansion
    v += d1 * 2.0 * (std::sqrt(b - t) - std::sqrt(t - a));
    v += 0.5 * d2 * (2.0 / 3.0) * (std::pow(b - t, 1.5) + std::pow(t - a, 1.5));
    return v;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("parabolic distance") {
    ParabolicPoint p, q;
    CHECK(par_dist(2, p, q) == 0.0);
    p.x0 = 3.0;
    q.t = 16.0;
    CHECK(par_dist(2, p, q) == doctest::Approx(5.0).epsilon(1e-15));

    // random pairs against an extended-precision evaluation
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        ParabolicPoint a{rng.uniform(-2, 2), {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                         rng.uniform(-2, 2)};
        ParabolicPoint b{rng.uniform(-2, 2), {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                         rng.uniform(-2, 2)};
        long double s = (long double)(a.x0 - b.x0) * (a.x0 - b.x0);
        s += (long double)(a.x[0] - b.x[0]) * (a.x[0] - b.x[0]);
        s += (long double)(a.x[1] - b.x[1]) * (a.x[1] - b.x[1]);
        s += fabsl((long double)a.t - b.t);
        CHECK(par_dist(3, a, b) ==
              doctest::Approx((double)sqrtl(s)).epsilon(1e-14));
    }
    // triangle inequality on random triples
    for (int i = 0; i < 10000; ++i) {
        auto rnd = [&]() {
            return ParabolicPoint{rng.uniform(-2, 2), {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                  rng.uniform(-2, 2)};
        };
        ParabolicPoint a = rnd(), b = rnd(), c = rnd();
        CHECK(par_dist(3, a, c) <= par_dist(3, a, b) + par_dist(3, b, c) + 1e-12);
    }
}

TEST_CASE("half derivative of a constant graph vanishes") {
    GraphDomain dom = make_graph_zero(1, chart_1d(64, -1.0, 1.0), 1.0);
    for (int m : {5, 31, 60}) CHECK(half_time_derivative(dom, 0, 0, m) == 0.0);
}

TEST_CASE("half derivative of sin t against the subtraction oracle") {
    int nt = 2049;
    ChartGrid c = chart_1d(nt, -3.14159265358979, 3.14159265358979);
    std::vector<double> s(nt);
    for (int m = 0; m < nt; ++m) s[m] = std::sin(c.t_lo + m * c.dt);
    GraphDomain dom = make_graph_samples(1, c, 1.0, s);

    auto psi = [](double t) { return std::sin(t); };
    // at t=0 the integrand is odd, both routes should be ~0
    int mid = (nt - 1) / 2;
    double v0 = half_time_derivative(dom, 0, 0, mid);
    double o0 = half_derivative_oracle(psi, 0.0, c.t_lo, c.t_lo + (nt - 1) * c.dt);
    CHECK(std::abs(o0) < 1e-8);
    CHECK(std::abs(v0 - o0) < 2e-3);
    // off-center evaluation
    int m1 = mid + static_cast<int>(0.7 / c.dt);
    double t1 = c.t_lo + m1 * c.dt;
    double v1 = half_time_derivative(dom, 0, 0, m1);
    double o1 = half_derivative_oracle(psi, t1, c.t_lo, c.t_lo + (nt - 1) * c.dt);
    CHECK(v1 == doctest::Approx(o1).epsilon(5e-3));
}

TEST_CASE("half derivative coarse grid signals") {
    GraphDomain dom = make_graph_zero(1, chart_1d(6, 0.0, 1.0), 1.0);
    CHECK_THROWS_AS(half_time_derivative(dom, 0, 0, 3), NumericalError);
}

TEST_CASE("even graphs fold to one-sided doubles") {
    int nt = 513;
    ChartGrid c = chart_1d(nt, -1.0, 1.0);
    std::vector<double> s(nt);
    for (int m = 0; m < nt; ++m) {
        double t = c.t_lo + m * c.dt;
        s[m] = std::cos(2.0 * t);  // even about t=0
    }
    GraphDomain dom = make_graph_samples(1, c, 1.0, s);
    int mid = (nt - 1) / 2;
    // symmetric quadrature equals twice the one-sided sum
    double full = half_time_derivative(dom, 0, 0, mid);
    double one_sided = 0.0;
    for (int q = mid + 1; q < nt; ++q) {
        double t = 0.0, sq = c.t_lo + q * c.dt;
        one_sided += (dom.sample(0, 0, q) - dom.sample(0, 0, mid)) /
                     std::pow(std::abs(sq - t), 1.5) * c.dt;
    }
    double second = (dom.sample(0, 0, mid + 1) - 2.0 * dom.sample(0, 0, mid) +
                     dom.sample(0, 0, mid - 1)) / (c.dt * c.dt);
    double singular = second * (2.0 / 3.0) * std::pow(0.5 * c.dt, 1.5);
    CHECK(full == doctest::Approx(2.0 * one_sided + singular).epsilon(1e-12));
}

TEST_CASE("character of canonical graphs") {
    SUBCASE("flat") {
        GraphDomain dom = make_graph_zero(2, chart_2d(17, -1, 1, 33, 0.5), 1.0);
        Character ch = character(dom);
        CHECK(ch.ell_spatial == 0.0);
        CHECK(ch.halfder_bmo == 0.0);
    }
    SUBCASE("linear in space") {
        GraphDomain dom = make_graph_linear(2, chart_2d(17, -1, 1, 33, 0.5), 1.0, {1.0, 0.0});
        Character ch = character(dom);
        CHECK(ch.ell_spatial == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ch.halfder_bmo < 1e-12);
    }
    SUBCASE("sine graph matches the exhaustive oracle") {
        GraphDomain dom = make_graph_sine(2, chart_2d(13, -1.5, 1.5, 25, 0.6), 1.0, 0.3,
                                          1.0, 1.0);
        Character ch = character(dom);
        // independent exhaustive scan
        const ChartGrid& c = dom.chart();
        double ell = 0.0;
        for (int m1 = 0; m1 < c.nt; ++m1)
            for (int j1 = 0; j1 < c.nx[0]; ++j1)
                for (int m2 = 0; m2 < c.nt; ++m2)
                    for (int j2 = 0; j2 < c.nx[0]; ++j2) {
                        if (m1 == m2 && j1 == j2) continue;
                        double dx = std::abs(j1 - j2) * c.dx;
                        double dt = std::abs(m1 - m2) * c.dt;
                        ell = std::max(ell, std::abs(dom.sample(j1, 0, m1) -
                                                     dom.sample(j2, 0, m2)) /
                                                (dx + std::sqrt(dt)));
                    }
        CHECK(ch.ell_spatial == doctest::Approx(ell).epsilon(1e-12));
        CHECK(ch.halfder_bmo > 0.0);
        CHECK(!ch.unbounded);
    }
}

TEST_CASE("sigma measure") {
    // grid over lateral [-2,2], time [0, 2.5]; cube Q_1 at (0, 1.25)
    Grid g = Grid::make(2, 1.0, 8, {-2.0, 0.0}, {2.0, 0.0}, 0.125, 2.5, 0.0625);
    ParabolicCube q{{0.0, 0.0}, 1.25 + 0.03125, 1.0};  // offset breaks center ties
    auto cells = boundary_cube_cells(g, q);

    SUBCASE("flat graph: cube mass is its volume") {
        GraphDomain dom = make_graph_zero(2, chart_2d(33, -2, 2, 41, 2.5), 1.0);
        CHECK(sigma_measure(dom, g, cells) == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("linear graph scales by the slope factor") {
        GraphDomain dom = make_graph_linear(2, chart_2d(33, -2, 2, 41, 2.5), 1.0, {1.0, 0.0});
        CHECK(sigma_measure(dom, g, cells) ==
              doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("sine graph against refined quadrature") {
        GraphDomain dom = make_graph_sine(2, chart_2d(257, -2, 2, 41, 2.5), 1.0, 0.3, 1.0,
                                          0.0);
        double got = sigma_measure(dom, g, cells);
        // oracle: 2 r^2 * int sqrt(1 + (0.3 cos x)^2) dx over the cube cells'
        // lateral extent
        double x_lo = 1e300, x_hi = -1e300;
        for (const BoundaryCell& bc : cells) {
            x_lo = std::min(x_lo, g.lat(0, bc.j0) - 0.5 * g.hx);
            x_hi = std::max(x_hi, g.lat(0, bc.j0) + 0.5 * g.hx);
        }
        int ksteps = 0;
        for (const BoundaryCell& bc : cells)
            if (bc.j0 == cells[0].j0) ++ksteps;
        double oracle_val = ksteps * g.ht *
                            adaptive_simpson(
                                [](double x) {
                                    return std::sqrt(1.0 + sqr(0.3 * std::cos(x)));
                                },
                                x_lo, x_hi, 1e-12);
        CHECK(got == doctest::Approx(oracle_val).epsilon(2e-3));
    }
    SUBCASE("additivity is exact") {
        GraphDomain dom = make_graph_sine(2, chart_2d(65, -2, 2, 41, 2.5), 1.0, 0.3, 1.0, 0.0);
        std::vector<BoundaryCell> left, right;
        for (const BoundaryCell& bc : cells)
            (bc.j0 % 2 == 0 ? left : right).push_back(bc);
        CHECK(sigma_measure(dom, g, cells) ==
              doctest::Approx(sigma_measure(dom, g, left) + sigma_measure(dom, g, right))
                  .epsilon(1e-13));
    }
    SUBCASE("flat-chart comparability of sigma and lateral volume") {
        GraphDomain dom = make_graph_sine(2, chart_2d(65, -2, 2, 41, 2.5), 1.0, 0.3, 1.0, 0.0);
        character(dom);
        double ell = dom.ell_spatial();
        Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<BoundaryCell> region;
            for (const BoundaryCell& bc : cells)
                if (rng.uniform() < 0.5) region.push_back(bc);
            if (region.empty()) continue;
            double lateral = static_cast<double>(region.size()) * g.hx * g.ht;
            double ratio = sigma_measure(dom, g, region) / lateral;
            CHECK(ratio >= 1.0 - 1e-12);
            CHECK(ratio <= std::sqrt(1.0 + ell * ell) + 1e-9);
        }
    }
}

TEST_CASE("corkscrew points") {
    Grid g = Grid::make(2, 1.0, 64, {-2.0, 0.0}, {2.0, 0.0}, 0.0625, 2.0, 0.0625 * 0.0625);
    SUBCASE("flat formula") {
        BoundaryBall b{{0.0, 0.0}, 0.1, 0.25};
        ParabolicPoint v = corkscrew(g, b, 0.5);
        CHECK(v.x0 == doctest::Approx(0.125));
        CHECK(v.x[0] == 0.0);
        CHECK(v.t == doctest::Approx(0.1 + 2.0 * 0.0625));
    }
    SUBCASE("exits the slab") {
        BoundaryBall big{{0.0, 0.0}, 1.5, 1.2};
        CHECK_THROWS_AS(corkscrew(g, big, 0.5), NumericalError);
    }
    SUBCASE("pullback height approximates the true graph distance") {
        GraphDomain dom = make_graph_sine(2, chart_2d(257, -2, 2, 129, 2.0), 1.0, 0.3, 1.0,
                                          0.0);
        double r = 0.35;
        BoundaryBall b{{0.3, 0.0}, 0.5, r};
        ParabolicPoint v = corkscrew(g, b, 0.5);
        // map to the original coordinates (identity-plus-graph near the
        // boundary suffices at this scale: x0 -> x0 + psi)
        ParabolicPoint vo;
        double xv[1] = {v.x[0]};
        vo.x0 = v.x0 + dom.psi(xv, v.t);
        vo.x = v.x;
        vo.t = v.t;
        double best = 1e300;
        const ChartGrid& c = dom.chart();
        for (int m = 0; m < c.nt; ++m)
            for (int j = 0; j < c.nx[0]; ++j) {
                ParabolicPoint bp;
                bp.x0 = dom.sample(j, 0, m);
                bp.x = {c.lo[0] + j * c.dx, 0.0};
                bp.t = c.t_lo + m * c.dt;
                best = std::min(best, par_dist(2, vo, bp));
            }
        CHECK(std::abs(best - v.x0) <= g.hx);
    }
}

TEST_CASE("carleson regions") {
    Grid g = Grid::make(1, 1.0, 64, {0, 0}, {1, 1}, 1.0 / 64, 0.25, 0.25 / 1024);
    SUBCASE("tiny ball is empty") {
        BoundaryBall b{{0, 0}, 0.1, 0.5 * g.h};
        CHECK(carleson_region(g, b).empty());
    }
    SUBCASE("cell count approximates the analytic volume") {
        double r = 20.0 * g.h;
        BoundaryBall b{{0, 0}, 0.125, r};
        auto cells = carleson_region(g, b);
        // volume of {y0 in (0,r), |s| < r^2 - y0^2} = 4 r^3 / 3
        double vol = 4.0 * r * r * r / 3.0;
        double got = static_cast<double>(cells.size()) * g.h * g.ht;
        CHECK(std::abs(got - vol) / vol < 0.10);
    }
    SUBCASE("monotone under doubling") {
        BoundaryBall b{{0, 0}, 0.125, 10.0 * g.h};
        BoundaryBall b2 = b;
        b2.r *= 2.0;
        auto small = carleson_region(g, b);
        auto big = carleson_region(g, b2);
        CHECK(big.size() >= small.size());
        for (const CellRef& cr : small) {
            bool found = false;
            for (const CellRef& cb : big)
                if (cb.cell == cr.cell && cb.k == cr.k) found = true;
            CHECK(found);
        }
    }
}

}  // TEST_SUITE
