#include "pmlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pmlab {

double par_dist(int n, const ParabolicPoint& p, const ParabolicPoint& q) {
    double s = sqr(p.x0 - q.x0);
    for (int a = 0; a < n - 1; ++a) s += sqr(p.x[a] - q.x[a]);
    s += std::abs(p.t - q.t);
    return std::sqrt(s);
}

GraphDomain::GraphDomain(ChartGrid chart, std::vector<double> samples, double H)
    : chart_(chart), samples_(std::move(samples)), H_(H) {
    // normalize psi(0,0) = 0 against the sample nearest the chart origin
    int j0 = std::clamp(static_cast<int>(std::lround(-chart_.lo[0] / std::max(chart_.dx, 1e-300))), 0,
                        chart_.nx[0] - 1);
    int j1 = chart_.n >= 3
                 ? std::clamp(static_cast<int>(std::lround(-chart_.lo[1] / chart_.dx)), 0,
                              chart_.nx[1] - 1)
                 : 0;
    int m0 = std::clamp(static_cast<int>(std::lround(-chart_.t_lo / std::max(chart_.dt, 1e-300))), 0,
                        chart_.nt - 1);
    double base = chart_.n == 1 ? samples_[chart_.node(0, 0, m0)]
                                : samples_[chart_.node(j0, j1, m0)];
    for (double& v : samples_) v -= base;
}

namespace {
// clamped linear interpolation index/fraction
inline void locate(double pos, double lo, double d, int nmax, int& i, double& f) {
    double u = (pos - lo) / d;
    if (u <= 0.0) { i = 0; f = 0.0; return; }
    if (u >= nmax - 1) { i = nmax - 2 >= 0 ? nmax - 2 : 0; f = nmax > 1 ? 1.0 : 0.0; return; }
    i = static_cast<int>(u);
    f = u - i;
}
}  // namespace

double GraphDomain::psi(const double* x, double t) const {
    const ChartGrid& c = chart_;
    int m; double ft;
    locate(t, c.t_lo, c.dt, c.nt, m, ft);
    int mp = std::min(m + 1, c.nt - 1);
    if (c.n == 1) {
        return (1 - ft) * samples_[c.node(0, 0, m)] + ft * samples_[c.node(0, 0, mp)];
    }
    int i0; double f0;
    locate(x[0], c.lo[0], c.dx, c.nx[0], i0, f0);
    int i0p = std::min(i0 + 1, c.nx[0] - 1);
    if (c.n == 2) {
        double a = (1 - f0) * samples_[c.node(i0, 0, m)] + f0 * samples_[c.node(i0p, 0, m)];
        double b = (1 - f0) * samples_[c.node(i0, 0, mp)] + f0 * samples_[c.node(i0p, 0, mp)];
        return (1 - ft) * a + ft * b;
    }
    int i1; double f1;
    locate(x[1], c.lo[1], c.dx, c.nx[1], i1, f1);
    int i1p = std::min(i1 + 1, c.nx[1] - 1);
    auto plane = [&](int mm) {
        double a00 = samples_[c.node(i0, i1, mm)], a10 = samples_[c.node(i0p, i1, mm)];
        double a01 = samples_[c.node(i0, i1p, mm)], a11 = samples_[c.node(i0p, i1p, mm)];
        return (1 - f0) * (1 - f1) * a00 + f0 * (1 - f1) * a10 + (1 - f0) * f1 * a01 +
               f0 * f1 * a11;
    };
    return (1 - ft) * plane(m) + ft * plane(mp);
}

void GraphDomain::grad_psi(const double* x, double t, double* g) const {
    double d = 0.5 * chart_.dx;
    for (int a = 0; a < chart_.n - 1; ++a) {
        double xp[2] = {x[0], chart_.n >= 3 ? x[1] : 0.0};
        double xm[2] = {x[0], chart_.n >= 3 ? x[1] : 0.0};
        xp[a] += d;
        xm[a] -= d;
        g[a] = (psi(xp, t) - psi(xm, t)) / (2.0 * d);
    }
}

double GraphDomain::dpsi_dt(const double* x, double t) const {
    double d = 0.5 * chart_.dt;
    if (d <= 0.0) return 0.0;
    return (psi(x, t + d) - psi(x, t - d)) / (2.0 * d);
}

GraphDomain make_graph_zero(int n, ChartGrid chart, double H) {
    chart.n = n;
    return GraphDomain(chart, std::vector<double>(chart.nodes(), 0.0), H);
}

GraphDomain make_graph_linear(int n, ChartGrid chart, double H, std::array<double, 2> alpha) {
    chart.n = n;
    std::vector<double> s(chart.nodes());
    for (int m = 0; m < chart.nt; ++m)
        for (int j1 = 0; j1 < chart.nx[1]; ++j1)
            for (int j0 = 0; j0 < chart.nx[0]; ++j0) {
                double v = 0.0;
                if (n >= 2) v += alpha[0] * (chart.lo[0] + j0 * chart.dx);
                if (n >= 3) v += alpha[1] * (chart.lo[1] + j1 * chart.dx);
                s[chart.node(j0, j1, m)] = v;
            }
    return GraphDomain(chart, std::move(s), H);
}

GraphDomain make_graph_sine(int n, ChartGrid chart, double H, double amp, double kx,
                            double kt) {
    chart.n = n;
    std::vector<double> s(chart.nodes());
    for (int m = 0; m < chart.nt; ++m)
        for (int j1 = 0; j1 < chart.nx[1]; ++j1)
            for (int j0 = 0; j0 < chart.nx[0]; ++j0) {
                double t = chart.t_lo + m * chart.dt;
                double v;
                if (n == 1) {
                    v = amp * std::sin(kt * t);
                } else {
                    double x = chart.lo[0] + j0 * chart.dx;
                    v = amp * std::sin(kx * x);
                    if (kt != 0.0) v *= std::sin(kt * t);
                    if (n >= 3) v *= std::cos(kx * (chart.lo[1] + j1 * chart.dx));
                }
                s[chart.node(j0, j1, m)] = v;
            }
    return GraphDomain(chart, std::move(s), H);
}

GraphDomain make_graph_samples(int n, ChartGrid chart, double H, std::vector<double> samples) {
    chart.n = n;
    if (static_cast<long>(samples.size()) != chart.nodes())
        throw ConfigError("graph sample count does not match chart grid");
    return GraphDomain(chart, std::move(samples), H);
}

double half_time_derivative(const GraphDomain& dom, int j0, int j1, int m, double c_n) {
    const ChartGrid& c = dom.chart();
    if (c.nt < 8)
        throw NumericalError("time grid too coarse for the singular half-derivative quadrature");
    if (m <= 0 || m >= c.nt - 1)
        throw NumericalError("half derivative requested at the edge of the sampled interval");
    double t = c.t_lo + m * c.dt;
    double center = dom.sample(j0, j1, m);
    double acc = 0.0;
    for (int q = 0; q < c.nt; ++q) {
        if (q == m) continue;
        double s = c.t_lo + q * c.dt;
        acc += (dom.sample(j0, j1, q) - center) / std::pow(std::abs(s - t), 1.5) * c.dt;
    }
    // singular cell [t - dt/2, t + dt/2]: odd part cancels in principal value,
    // the even part integrates to psi'' * (2/3) (dt/2)^{3/2}
    double second = (dom.sample(j0, j1, m + 1) - 2.0 * center + dom.sample(j0, j1, m - 1)) /
                    (c.dt * c.dt);
    acc += second * (2.0 / 3.0) * std::pow(0.5 * c.dt, 1.5);
    return c_n * acc;
}

namespace {

// mean oscillation of f over a window of chart nodes
double mean_osc(const std::vector<double>& f, const ChartGrid& c, int j0a, int j0b, int j1a,
                int j1b, int ma, int mb) {
    double sum = 0.0;
    long cnt = 0;
    for (int m = ma; m <= mb; ++m)
        for (int j1 = j1a; j1 <= j1b; ++j1)
            for (int j0 = j0a; j0 <= j0b; ++j0) {
                sum += f[c.node(j0, j1, m)];
                ++cnt;
            }
    double mean = sum / cnt;
    double osc = 0.0;
    for (int m = ma; m <= mb; ++m)
        for (int j1 = j1a; j1 <= j1b; ++j1)
            for (int j0 = j0a; j0 <= j0b; ++j0)
                osc += std::abs(f[c.node(j0, j1, m)] - mean);
    return osc / cnt;
}

}  // namespace

Character character(GraphDomain& dom, double c_n) {
    const ChartGrid& c = dom.chart();
    Character out;

    // Lip(1,1/2) constant: exhaustive scan over sample pairs
    struct Node { double x0, x1, t, v; };
    std::vector<Node> nodes;
    nodes.reserve(c.nodes());
    for (int m = 0; m < c.nt; ++m)
        for (int j1 = 0; j1 < c.nx[1]; ++j1)
            for (int j0 = 0; j0 < c.nx[0]; ++j0)
                nodes.push_back({c.lo[0] + j0 * c.dx,
                                 c.n >= 3 ? c.lo[1] + j1 * c.dx : 0.0,
                                 c.t_lo + m * c.dt, dom.sample(j0, j1, m)});
    double ell = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            double dx = std::abs(nodes[i].x0 - nodes[j].x0);
            if (c.n >= 3) dx = std::hypot(dx, nodes[i].x1 - nodes[j].x1);
            if (c.n == 1) dx = 0.0;
            double den = dx + std::sqrt(std::abs(nodes[i].t - nodes[j].t));
            if (den > 0.0) ell = std::max(ell, std::abs(nodes[i].v - nodes[j].v) / den);
        }
    out.ell_spatial = ell;

    // BMO norm of the half derivative over sampled parabolic cubes
    if (c.nt >= 8) {
        std::vector<double> d(c.nodes(), 0.0);
        bool bad = false;
        for (int m = 1; m < c.nt - 1; ++m)
            for (int j1 = 0; j1 < c.nx[1]; ++j1)
                for (int j0 = 0; j0 < c.nx[0]; ++j0) {
                    double v = half_time_derivative(dom, j0, j1, m, c_n);
                    if (!std::isfinite(v)) bad = true;
                    d[c.node(j0, j1, m)] = v;
                }
        out.unbounded = bad;
        // cube family: dyadic spatial half-widths w (in nodes), time extent w^2
        // scaled by dt ~ dx^2; all positions
        double bmo = 0.0;
        int max_w = std::max(c.nx[0], static_cast<int>(std::sqrt(static_cast<double>(c.nt))));
        for (int w = 1; w <= max_w; w *= 2) {
            int wt = std::max(1, static_cast<int>(std::lround(
                         sqr(w * c.dx) / c.dt)));  // time nodes spanning (w dx)^2
            if (wt >= c.nt - 2) wt = c.nt - 3;
            if (wt < 1) continue;
            int wx = std::min(w, c.nx[0] - 1);
            for (int m = 1; m + wt < c.nt - 1; m += std::max(1, wt / 2))
                for (int j1 = 0; j1 + (c.n >= 3 ? wx : 0) < c.nx[1]; j1 += std::max(1, wx / 2))
                    for (int j0 = 0; j0 + (c.n >= 2 ? wx : 0) < c.nx[0];
                         j0 += std::max(1, wx / 2)) {
                        int j0b = c.n >= 2 ? j0 + wx : j0;
                        int j1b = c.n >= 3 ? j1 + wx : j1;
                        bmo = std::max(bmo, mean_osc(d, c, j0, j0b, j1, j1b, m, m + wt));
                    }
        }
        out.halfder_bmo = bmo;
    }
    dom.set_character(out.ell_spatial, out.halfder_bmo, out.unbounded);
    return out;
}

double sigma_measure(const GraphDomain& dom, const Grid& grid,
                     const std::vector<BoundaryCell>& region) {
    double mass = 0.0;
    double area = 1.0;
    for (int a = 0; a < grid.lat_axes(); ++a) area *= grid.hx;
    for (const BoundaryCell& bc : region) {
        double fac = 1.0;
        if (grid.n >= 2) {
            double x[2] = {grid.lat(0, bc.j0), grid.n >= 3 ? grid.lat(1, bc.j1) : 0.0};
            double g[2] = {0.0, 0.0};
            dom.grad_psi(x, grid.time(bc.k), g);
            double g2 = sqr(g[0]) + (grid.n >= 3 ? sqr(g[1]) : 0.0);
            fac = std::sqrt(1.0 + g2);
        }
        mass += fac * area * grid.ht;
    }
    return mass;
}

ParabolicPoint corkscrew(const Grid& grid, const BoundaryBall& ball, double c_v) {
    ParabolicPoint p;
    p.x0 = c_v * ball.r;
    p.x = ball.y;
    p.t = ball.s + 2.0 * ball.r * ball.r;
    if (p.x0 >= grid.height())
        throw NumericalError("corkscrew point exits the slab in height (ball too large)");
    if (p.t > grid.time_end() + 1e-12)
        throw NumericalError("corkscrew point exits the slab in time (ball too large)");
    for (int a = 0; a < grid.lat_axes(); ++a) {
        double lo = grid.lat_lo[a], hi = grid.lat_lo[a] + grid.nlat[a] * grid.hx;
        if (p.x[a] < lo || p.x[a] > hi)
            throw NumericalError("corkscrew point exits the lateral box");
    }
    return p;
}

std::vector<CellRef> carleson_region(const Grid& grid, const BoundaryBall& ball) {
    std::vector<CellRef> cells;
    double r2 = sqr(ball.r);
    for (int k = 1; k <= grid.nt; ++k) {
        double dt = std::abs(grid.time(k) - ball.s);
        if (dt >= r2) continue;
        for (int j1 = 0; j1 < grid.nlat[1]; ++j1)
            for (int j0 = 0; j0 < grid.nlat[0]; ++j0) {
                double dl = 0.0;
                if (grid.n >= 2) dl += sqr(grid.lat(0, j0) - ball.y[0]);
                if (grid.n >= 3) dl += sqr(grid.lat(1, j1) - ball.y[1]);
                if (dl + dt >= r2) continue;
                double rem = r2 - dl - dt;
                for (int i0 = 0; i0 < grid.nx0; ++i0) {
                    if (sqr(grid.x0(i0)) >= rem) break;
                    cells.push_back({grid.cell(i0, j0, j1), k});
                }
            }
    }
    return cells;
}

std::vector<BoundaryCell> boundary_ball_cells(const Grid& grid, const BoundaryBall& ball) {
    std::vector<BoundaryCell> cells;
    double r2 = sqr(ball.r);
    for (int k = 1; k <= grid.nt; ++k) {
        double dt = std::abs(grid.time(k) - ball.s);
        if (dt >= r2) continue;
        for (int j1 = 0; j1 < grid.nlat[1]; ++j1)
            for (int j0 = 0; j0 < grid.nlat[0]; ++j0) {
                double dl = 0.0;
                if (grid.n >= 2) dl += sqr(grid.lat(0, j0) - ball.y[0]);
                if (grid.n >= 3) dl += sqr(grid.lat(1, j1) - ball.y[1]);
                if (dl + dt < r2) cells.push_back({j0, j1, k});
            }
    }
    return cells;
}

std::vector<BoundaryCell> boundary_cube_cells(const Grid& grid, const ParabolicCube& cube) {
    std::vector<BoundaryCell> cells;
    double r2 = sqr(cube.r);
    for (int k = 1; k <= grid.nt; ++k) {
        if (std::abs(grid.time(k) - cube.s) >= r2) continue;
        for (int j1 = 0; j1 < grid.nlat[1]; ++j1)
            for (int j0 = 0; j0 < grid.nlat[0]; ++j0) {
                bool in = true;
                if (grid.n >= 2 && std::abs(grid.lat(0, j0) - cube.y[0]) >= cube.r) in = false;
                if (grid.n >= 3 && std::abs(grid.lat(1, j1) - cube.y[1]) >= cube.r) in = false;
                if (in) cells.push_back({j0, j1, k});
            }
    }
    return cells;
}

}  // namespace pmlab
