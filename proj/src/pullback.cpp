#include "pmlab/pullback.hpp"

#include <cmath>

namespace pmlab {

Mollifier::Mollifier(int n, int pts) : n_(n) {
    if (pts < 17) pts = 17;
    nodes_.resize(pts);
    std::vector<double> b(pts);
    for (int i = 0; i < pts; ++i) {
        double s = -1.0 + (i + 0.5) * 2.0 / pts;  // symmetric midpoint nodes
        nodes_[i] = s;
        b[i] = std::exp(-1.0 / (1.0 - s * s));
    }
    int axes = n;  // (n-1) lateral + 1 time
    long total = 1;
    for (int a = 0; a < axes; ++a) total *= pts;
    w_.assign(total, 0.0);
    double sum = 0.0;
    for (long q = 0; q < total; ++q) {
        long r = q;
        double w = 1.0;
        for (int a = 0; a < axes; ++a) {
            w *= b[r % pts];
            r /= pts;
        }
        w_[q] = w;
        sum += w;
    }
    for (double& w : w_) w /= sum;  // unit discrete mass
}

double mollified_graph(const GraphDomain& dom, const Mollifier& P, double lambda,
                       const double* x, double t) {
    if (lambda <= 0.0) {
        return dom.psi(x, t);
    }
    int n = dom.n();
    const std::vector<double>& nd = P.nodes();
    int m = static_cast<int>(nd.size());
    double acc = 0.0;
    if (n == 1) {
        for (int it = 0; it < m; ++it)
            acc += P.weight(0, 0, it) * dom.psi(nullptr, t - lambda * lambda * nd[it]);
    } else if (n == 2) {
        for (int it = 0; it < m; ++it)
            for (int i0 = 0; i0 < m; ++i0) {
                double y[1] = {x[0] - lambda * nd[i0]};
                acc += P.weight(i0, 0, it) * dom.psi(y, t - lambda * lambda * nd[it]);
            }
    } else {
        for (int it = 0; it < m; ++it)
            for (int i1 = 0; i1 < m; ++i1)
                for (int i0 = 0; i0 < m; ++i0) {
                    double y[2] = {x[0] - lambda * nd[i0], x[1] - lambda * nd[i1]};
                    acc += P.weight(i0, i1, it) * dom.psi(y, t - lambda * lambda * nd[it]);
                }
    }
    return acc;
}

MollifiedDerivs mollified_graph_derivs(const GraphDomain& dom, const Mollifier& P,
                                       double lambda, const double* x, double t) {
    MollifiedDerivs out;
    int n = dom.n();
    const std::vector<double>& nd = P.nodes();
    int m = static_cast<int>(nd.size());
    auto accumulate = [&](double w, const double* y, double s, double xi0, double xi1,
                          double tau) {
        out.value += w * dom.psi(y, s);
        double g[2] = {0.0, 0.0};
        if (n >= 2) dom.grad_psi(y, s, g);
        double pt = dom.dpsi_dt(y, s);
        double dl = -2.0 * lambda * tau * pt;
        if (n >= 2) dl -= xi0 * g[0];
        if (n >= 3) dl -= xi1 * g[1];
        out.dlambda += w * dl;
        out.dlat[0] += w * g[0];
        out.dlat[1] += w * g[1];
        out.dt += w * pt;
    };
    if (n == 1) {
        for (int it = 0; it < m; ++it)
            accumulate(P.weight(0, 0, it), nullptr, t - lambda * lambda * nd[it], 0.0, 0.0,
                       nd[it]);
    } else if (n == 2) {
        for (int it = 0; it < m; ++it)
            for (int i0 = 0; i0 < m; ++i0) {
                double y[1] = {x[0] - lambda * nd[i0]};
                accumulate(P.weight(i0, 0, it), y, t - lambda * lambda * nd[it], nd[i0], 0.0,
                           nd[it]);
            }
    } else {
        for (int it = 0; it < m; ++it)
            for (int i1 = 0; i1 < m; ++i1)
                for (int i0 = 0; i0 < m; ++i0) {
                    double y[2] = {x[0] - lambda * nd[i0], x[1] - lambda * nd[i1]};
                    accumulate(P.weight(i0, i1, it), y, t - lambda * lambda * nd[it], nd[i0],
                               nd[i1], nd[it]);
                }
    }
    return out;
}

AdaptedMap build_map(const GraphDomain& dom, const Mollifier& P, const Grid& grid,
                     double gamma) {
    if (gamma <= 0.0) throw ConfigError("gamma must be positive");
    AdaptedMap map;
    map.grid = grid;
    map.gamma = gamma;
    map.phi = SpaceTimeField(grid, grid.nt);
    map.dphi_dx0 = SpaceTimeField(grid, grid.nt);
    for (int a = 0; a < grid.lat_axes(); ++a) map.dphi_dlat[a] = SpaceTimeField(grid, grid.nt);
    map.dphi_dt = SpaceTimeField(grid, grid.nt);

    // derivatives taken through the mollifier quadrature; phi_x0 enters via
    // the scale lambda = gamma x0
    for (int k = 0; k <= grid.nt; ++k) {
        double t = grid.time(k);
        for (int j1 = 0; j1 < grid.nlat[1]; ++j1)
            for (int j0 = 0; j0 < grid.nlat[0]; ++j0) {
                double x[2] = {grid.n >= 2 ? grid.lat(0, j0) : 0.0,
                               grid.n >= 3 ? grid.lat(1, j1) : 0.0};
                for (int i0 = 0; i0 < grid.nx0; ++i0) {
                    long c = grid.cell(i0, j0, j1);
                    MollifiedDerivs d =
                        mollified_graph_derivs(dom, P, gamma * grid.x0(i0), x, t);
                    map.phi.at(c, k) = d.value;
                    map.dphi_dx0.at(c, k) = gamma * d.dlambda;
                    for (int a = 0; a < grid.lat_axes(); ++a)
                        map.dphi_dlat[a].at(c, k) = d.dlat[a];
                    map.dphi_dt.at(c, k) = d.dt;
                }
            }
    }

    double mind = 1.0;
    for (double v : map.dphi_dx0.v) mind = std::min(mind, 1.0 + v);
    map.min_dx0_rho0 = mind;
    if (mind <= 0.0)
        throw NumericalError("adapted map not injective: d(rho_0)/d(x0) <= 0; reduce gamma");

    // boundary trace at the first interior height
    double err = 0.0;
    for (int j1 = 0; j1 < grid.nlat[1]; ++j1)
        for (int j0 = 0; j0 < grid.nlat[0]; ++j0) {
            double x[2] = {grid.n >= 2 ? grid.lat(0, j0) : 0.0,
                           grid.n >= 3 ? grid.lat(1, j1) : 0.0};
            for (int k = 0; k <= grid.nt; ++k) {
                double ps = dom.psi(x, grid.time(k));
                err = std::max(err,
                               std::abs(map.phi.at(grid.cell(0, j0, j1), k) - ps));
            }
        }
    map.trace_error = err;
    return map;
}

SymMat TransformedCoefficients::A_at(long c, int k) const {
    SymMat m;
    m.n = n;
    const double* p = A.data() + (static_cast<size_t>(k) * grid.ncells() + c) * 6;
    int q = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            m(i, j) = p[q];
            m(j, i) = p[q];
            ++q;
        }
    return m;
}

Vec3 TransformedCoefficients::B_at(long c, int k) const {
    Vec3 b;
    b.n = n;
    const double* p = B.data() + (static_cast<size_t>(k) * grid.ncells() + c) * 3;
    for (int i = 0; i < n; ++i) b[i] = p[i];
    return b;
}

TransformedCoefficients transform_coefficients(const MatrixField& A_on_domain,
                                               const GraphDomain& dom, const AdaptedMap& map) {
    const Grid& g = map.grid;
    int n = g.n;
    TransformedCoefficients tc;
    tc.grid = g;
    tc.n = n;
    tc.A.assign(static_cast<size_t>(g.nt + 1) * g.ncells() * 6, 0.0);
    tc.B.assign(static_cast<size_t>(g.nt + 1) * g.ncells() * 3, 0.0);

    // det J = 1 + phi_x0 and its spatial gradient (finite differences of the
    // sampled determinant field)
    SpaceTimeField detJ(g, g.nt);
    for (long c = 0; c < g.ncells(); ++c)
        for (int k = 0; k <= g.nt; ++k) detJ.at(c, k) = 1.0 + map.dphi_dx0.at(c, k);

    auto fd_axis = [&](const SpaceTimeField& f, long cell, int k, int axis) {
        int i0, j0, j1;
        g.cell_coords(cell, i0, j0, j1);
        int idx = axis == 0 ? i0 : (axis == 1 ? j0 : j1);
        int nmax = axis == 0 ? g.nx0 : g.nlat[axis - 1];
        double d = g.spacing(axis);
        auto at = [&](int ii) {
            int cc[3] = {i0, j0, j1};
            cc[axis] = ii;
            return f.at(g.cell(cc[0], cc[1], cc[2]), k);
        };
        if (nmax == 1) return 0.0;
        if (idx == 0)
            return nmax >= 3 ? (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * d)
                             : (at(1) - at(0)) / d;
        if (idx == nmax - 1)
            return nmax >= 3 ? (3.0 * at(idx) - 4.0 * at(idx - 1) + at(idx - 2)) / (2.0 * d)
                             : (at(idx) - at(idx - 1)) / d;
        return (at(idx + 1) - at(idx - 1)) / (2.0 * d);
    };

    double lam = 1e300, Lam = -1e300;
    for (int k = 0; k <= g.nt; ++k) {
        double t = g.time(k);
        for (long c = 0; c < g.ncells(); ++c) {
            int i0, j0, j1;
            g.cell_coords(c, i0, j0, j1);
            ParabolicPoint Y;
            Y.x0 = g.x0(i0) + map.phi.at(c, k);  // image point rho(cell)
            Y.x = {g.n >= 2 ? g.lat(0, j0) : 0.0, g.n >= 3 ? g.lat(1, j1) : 0.0};
            Y.t = t;
            SymMat A = A_on_domain(Y, t);

            double gdet = detJ.at(c, k);
            double px[2] = {g.n >= 2 ? map.dphi_dlat[0].at(c, k) : 0.0,
                            g.n >= 3 ? map.dphi_dlat[1].at(c, k) : 0.0};
            // J^{-1} rows: first row (1/g, -px0/g, -px1/g), others identity
            double Jinv[3][3] = {{1.0 / gdet, -px[0] / gdet, -px[1] / gdet},
                                 {0.0, 1.0, 0.0},
                                 {0.0, 0.0, 1.0}};
            // Ahat = Jinv * A * Jinv^T
            double AJt[3][3] = {};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int q = 0; q < n; ++q) s += A(i, q) * Jinv[j][q];
                    AJt[i][j] = s;
                }
            SymMat Ah;
            Ah.n = n;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int q = 0; q < n; ++q) s += Jinv[i][q] * AJt[q][j];
                    Ah(i, j) = s;
                }
            // symmetrize against round-off
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double s = 0.5 * (Ah(i, j) + Ah(j, i));
                    Ah(i, j) = s;
                    Ah(j, i) = s;
                }

            double dg[3] = {fd_axis(detJ, c, k, 0),
                            n >= 2 ? fd_axis(detJ, c, k, 1) : 0.0,
                            n >= 3 ? fd_axis(detJ, c, k, 2) : 0.0};
            Vec3 B;
            B.n = n;
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += Ah(i, j) * dg[i];
                B[j] = s / gdet;
            }
            B[0] += map.dphi_dt.at(c, k) / gdet;

            double* pa = tc.A.data() + (static_cast<size_t>(k) * g.ncells() + c) * 6;
            int q = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) pa[q++] = Ah(i, j);
            double* pb = tc.B.data() + (static_cast<size_t>(k) * g.ncells() + c) * 3;
            for (int i = 0; i < n; ++i) pb[i] = B[i];

            auto [lo, hi] = sym_eig_range(Ah);
            lam = std::min(lam, lo);
            Lam = std::max(Lam, hi);
        }
    }
    tc.lambda_rho = lam;
    tc.Lambda_rho = Lam;
    if (lam <= 0.0)
        throw NumericalError("transformed coefficients lost ellipticity (lambda_rho <= 0)");
    return tc;
}

}  // namespace pmlab
