#include "pmlab/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace pmlab {

ProblemData ProblemData::zero() {
    ProblemData d;
    d.bottom = [](const Grid&, int, int, int) { return 0.0; };
    d.top = [](const Grid&, int, int, int) { return 0.0; };
    d.side = [](const Grid&, int, int, int, int, int) { return 0.0; };
    d.initial = [](const Grid&, int, int, int) { return 0.0; };
    return d;
}

ProblemData ProblemData::lateral_only(
    std::function<double(const Grid&, int j0, int j1, int k)> f) {
    ProblemData d = zero();
    d.bottom = std::move(f);
    return d;
}

DiscreteOperator::DiscreteOperator(const Grid& grid, CoefficientField coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.n != grid_.n) throw ConfigError("coefficient dimension mismatch");
    // probe assembly fills the diagnostics
    StepSystem probe;
    assemble(std::min(1, grid_.nt), probe, false);
    if (!coeffs_.time_dependent) {
        cache_ = std::move(probe);
        cached_k_ = std::min(1, grid_.nt);
    }
}

const DiscreteOperator::StepSystem& DiscreteOperator::step(int k) const {
    if (!coeffs_.time_dependent) {
        if (cached_k_ < 0) {
            assemble(k, cache_, false);
            cached_k_ = k;
        }
        return cache_;
    }
    if (cached_k_ != k) {
        assemble(k, cache_, false);
        cached_k_ = k;
    }
    return cache_;
}

DiscreteOperator::StepSystem DiscreteOperator::stationary(int k) const {
    StepSystem s;
    assemble(k, s, true);
    return s;
}

namespace {
inline double harm(double a, double b) {
    double s = a + b;
    return s > 0.0 ? 2.0 * a * b / s : 0.0;
}
}  // namespace

void DiscreteOperator::assemble(int k, StepSystem& out, bool stationary) const {
    const Grid& g = grid_;
    const int n = g.n;
    const long N = g.ncells();

    // per-cell decomposition scratch
    struct PairIdx {
        int i, j;
    };
    static const PairIdx pairs3[3] = {{0, 1}, {0, 2}, {1, 2}};
    const int npairs = n == 1 ? 0 : (n == 2 ? 1 : 3);

    std::vector<std::array<double, 3>> cdiag(N);  // reduced diagonals per axis
    std::vector<std::array<double, 3>> lam(N);    // |a_ij| per pair
    std::vector<std::array<int, 3>> sgn(N);
    std::vector<std::array<double, 3>> drift(N);

    double min_reduced = 1e300;
    bool has_pairs = false;
    for (long c = 0; c < N; ++c) {
        SymMat A = coeffs_.A(g, c, k);
        for (int i = 0; i < n; ++i) {
            double red = A(i, i);
            for (int j = 0; j < n; ++j)
                if (j != i) red -= std::abs(A(i, j));
            cdiag[c][i] = red;
            min_reduced = std::min(min_reduced, red);
        }
        for (int p = 0; p < npairs; ++p) {
            double a = A(pairs3[p].i, pairs3[p].j);
            lam[c][p] = std::abs(a);
            sgn[c][p] = a > 0.0 ? 1 : (a < 0.0 ? -1 : 0);
            if (lam[c][p] > 0.0) has_pairs = true;
        }
        if (coeffs_.B) {
            Vec3 b = coeffs_.B(g, c, k);
            for (int i = 0; i < n; ++i) drift[c][i] = b[i];
        } else {
            drift[c] = {0.0, 0.0, 0.0};
        }
    }
    info_.min_reduced_diag = min_reduced;
    if (min_reduced < 0.0) {
        std::ostringstream msg;
        msg << "anisotropy too strong for a monotone stencil: min(a_ii - sum|a_ij|) = "
            << min_reduced;
        throw NumericalError(msg.str());
    }
    if (has_pairs && n >= 2 && std::abs(g.h - g.hx) > 1e-12 * g.h)
        throw NumericalError("mixed coefficient entries require h == hx");

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(N) * (2 * n + 2 * npairs + 1));
    out.couplings.clear();

    auto add = [&](long r, long c, double v) { trip.emplace_back(r, c, v); };
    const double scale = stationary ? 1.0 : g.ht;  // matrix is I - ht L (or -L)

    // L triplets accumulated with the opposite sign (M = I - ht L)
    auto addL = [&](long r, long c, double v) { add(r, c, -scale * v); };
    auto couple = [&](long cell, Piece piece, int a, int b, double w) {
        out.couplings.push_back({cell, piece, a, b, w});
    };

    const int nlat0 = g.nlat[0], nlat1 = g.nlat[1];
    for (int j1 = 0; j1 < nlat1; ++j1)
        for (int j0 = 0; j0 < nlat0; ++j0)
            for (int i0 = 0; i0 < g.nx0; ++i0) {
                long c = g.cell(i0, j0, j1);
                const int idx[3] = {i0, j0, j1};
                const int nmax[3] = {g.nx0, nlat0, nlat1};

                // axis diffusion (reduced diagonal part)
                for (int ax = 0; ax < n; ++ax) {
                    double d = g.spacing(ax);
                    double inv2 = 1.0 / (d * d);
                    // upper face
                    if (idx[ax] + 1 < nmax[ax]) {
                        int cc[3] = {i0, j0, j1};
                        cc[ax] += 1;
                        long q = g.cell(cc[0], cc[1], cc[2]);
                        double f = harm(cdiag[c][ax], cdiag[q][ax]) * inv2;
                        addL(c, q, f);
                        addL(c, c, -f);
                        addL(q, c, f);
                        addL(q, q, -f);
                    } else {
                        double f = 2.0 * cdiag[c][ax] * inv2;
                        addL(c, c, -f);
                        if (ax == 0)
                            couple(c, Piece::Top, j0, j1, f);
                        else
                            couple(c, ax == 1 ? Piece::SideHi0 : Piece::SideHi1, i0,
                                   ax == 1 ? j1 : j0, f);
                    }
                    // lower face: interior segment handled by the neighbour's
                    // upper face; only the boundary face remains
                    if (idx[ax] == 0) {
                        double f = 2.0 * cdiag[c][ax] * inv2;
                        addL(c, c, -f);
                        if (ax == 0)
                            couple(c, Piece::Bottom, j0, j1, f);
                        else
                            couple(c, ax == 1 ? Piece::SideLo0 : Piece::SideLo1, i0,
                                   ax == 1 ? j1 : j0, f);
                    }
                }

                // mixed entries: row-local two-point fluxes along the diagonal
                // direction w = e_i + sign(a_ij) e_j, cell-owned magnitude
                // (first-order face value) so every row keeps sign structure
                for (int p = 0; p < npairs; ++p) {
                    double l = lam[c][p];
                    if (l == 0.0) continue;
                    int s = sgn[c][p];
                    int ai = pairs3[p].i, aj = pairs3[p].j;
                    double inv2 = 1.0 / sqr(g.spacing(ai));
                    for (int dir = +1; dir >= -1; dir -= 2) {
                        int di = dir, dj = dir * s;
                        int ci = idx[ai] + di, cj = idx[aj] + dj;
                        bool ai_in = ci >= 0 && ci < nmax[ai];
                        bool aj_in = cj >= 0 && cj < nmax[aj];
                        if (ai_in && aj_in) {
                            int cc[3] = {i0, j0, j1};
                            cc[ai] = ci;
                            cc[aj] = cj;
                            addL(c, g.cell(cc[0], cc[1], cc[2]), l * inv2);
                            addL(c, c, -l * inv2);
                            continue;
                        }
                        // ghost endpoint: the segment crosses a Dirichlet face at
                        // half spacing; the data value is the mean of the two
                        // face samples adjacent to the crossing point
                        double f = 2.0 * l * inv2;
                        addL(c, c, -f);
                        if (!ai_in && ai == 0) {  // height face wins at corners
                            Piece piece = ci < 0 ? Piece::Bottom : Piece::Top;
                            int a1 = j0, b1 = j1;
                            if (aj == 1)
                                a1 = std::clamp(j0 + dj, 0, nlat0 - 1);
                            else
                                b1 = std::clamp(j1 + dj, 0, nlat1 - 1);
                            couple(c, piece, j0, j1, 0.5 * f);
                            couple(c, piece, a1, b1, 0.5 * f);
                        } else {
                            int ax_out = !ai_in ? ai : aj;
                            int dir_out = !ai_in ? di : dj;
                            Piece piece = ax_out == 1
                                              ? (dir_out < 0 ? Piece::SideLo0 : Piece::SideHi0)
                                              : (dir_out < 0 ? Piece::SideLo1 : Piece::SideHi1);
                            int in_ax = ax_out == ai ? aj : ai;  // axis varying in-face
                            int in_d = ax_out == ai ? dj : di;
                            int ia0 = i0, jb0 = ax_out == 1 ? j1 : j0;
                            int ia1 = ia0, jb1 = jb0;
                            if (in_ax == 0)
                                ia1 = std::clamp(i0 + in_d, 0, g.nx0 - 1);
                            else if (in_ax == 1)
                                jb1 = std::clamp(j0 + in_d, 0, nlat0 - 1);
                            else
                                jb1 = std::clamp(j1 + in_d, 0, nlat1 - 1);
                            couple(c, piece, ia0, jb0, 0.5 * f);
                            couple(c, piece, ia1, jb1, 0.5 * f);
                        }
                    }
                }

                // drift, fully upwinded (monotone at any strength)
                for (int ax = 0; ax < n; ++ax) {
                    double b = drift[c][ax];
                    if (b == 0.0) continue;
                    double d = g.spacing(ax);
                    double bp = std::max(b, 0.0), bm = std::min(b, 0.0);
                    if (bp > 0.0) {  // forward difference
                        if (idx[ax] + 1 < nmax[ax]) {
                            int cc[3] = {i0, j0, j1};
                            cc[ax] += 1;
                            addL(c, g.cell(cc[0], cc[1], cc[2]), bp / d);
                            addL(c, c, -bp / d);
                        } else {
                            addL(c, c, -2.0 * bp / d);
                            if (ax == 0)
                                couple(c, Piece::Top, j0, j1, 2.0 * bp / d);
                            else
                                couple(c, ax == 1 ? Piece::SideHi0 : Piece::SideHi1, i0,
                                       ax == 1 ? j1 : j0, 2.0 * bp / d);
                        }
                    }
                    if (bm < 0.0) {  // backward difference
                        if (idx[ax] - 1 >= 0) {
                            int cc[3] = {i0, j0, j1};
                            cc[ax] -= 1;
                            addL(c, g.cell(cc[0], cc[1], cc[2]), -bm / d);
                            addL(c, c, bm / d);
                        } else {
                            addL(c, c, 2.0 * bm / d);
                            if (ax == 0)
                                couple(c, Piece::Bottom, j0, j1, -2.0 * bm / d);
                            else
                                couple(c, ax == 1 ? Piece::SideLo0 : Piece::SideLo1, i0,
                                       ax == 1 ? j1 : j0, -2.0 * bm / d);
                        }
                    }
                }
            }

    if (!stationary)
        for (long c = 0; c < N; ++c) add(c, c, 1.0);

    out.M.resize(N, N);
    out.M.setFromTriplets(trip.begin(), trip.end());
    out.M.makeCompressed();

    // monotonicity diagnostics on the assembled matrix
    double max_off = 0.0, min_rowsum = 1e300;
    for (long r = 0; r < N; ++r) {
        double rowsum = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(out.M, r); it; ++it) {
            // column-major: iterate rows of column r; matrix is structurally
            // symmetric so the off-diagonal check is equivalent
            if (it.row() != it.col()) max_off = std::max(max_off, it.value());
            rowsum += it.value();
        }
        min_rowsum = std::min(min_rowsum, rowsum);
    }
    info_.max_offdiag = max_off;
    info_.min_row_sum = min_rowsum;
    info_.mmatrix_ok = max_off <= 1e-13;
}

namespace {

double eval_piece(const Grid& g, const ProblemData& d, const DiscreteOperator::Coupling& cp,
                  int k) {
    switch (cp.piece) {
        case Piece::Bottom:
            return d.bottom ? d.bottom(g, cp.a, cp.b, k) : 0.0;
        case Piece::Top:
            return d.top ? d.top(g, cp.a, cp.b, k) : 0.0;
        case Piece::SideLo0:
            return d.side ? d.side(g, 0, 0, cp.a, cp.b, k) : 0.0;
        case Piece::SideHi0:
            return d.side ? d.side(g, 0, 1, cp.a, cp.b, k) : 0.0;
        case Piece::SideLo1:
            return d.side ? d.side(g, 1, 0, cp.a, cp.b, k) : 0.0;
        case Piece::SideHi1:
            return d.side ? d.side(g, 1, 1, cp.a, cp.b, k) : 0.0;
    }
    return 0.0;
}

using Solver =
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>>;

Eigen::VectorXd solve_system(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& guess, const SolverParams& p,
                             const char* what, int step) {
    Solver solver;
    solver.setTolerance(p.tol);
    solver.setMaxIterations(p.max_iter);
    solver.compute(M);
    Eigen::VectorXd x = solver.solveWithGuess(rhs, guess);
    double rhs_norm = rhs.norm();
    double res = (M * x - rhs).norm();
    double rel = rhs_norm > 0.0 ? res / rhs_norm : res;
    if (!(rel <= std::max(p.tol * 100.0, 1e-13))) {
        std::ostringstream msg;
        msg << what << " solve did not converge at step " << step << ": relative residual "
            << rel << " after " << solver.iterations() << " iterations (cap " << p.max_iter
            << ")";
        throw NumericalError(msg.str());
    }
    return x;
}

}  // namespace

std::vector<double> elliptic_extension(const DiscreteOperator& op, const ProblemData& data,
                                       const SolverParams& params) {
    auto sys = op.stationary(0);
    const Grid& g = op.grid();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.ncells());
    for (const auto& cp : sys.couplings) rhs[cp.cell] += cp.w * eval_piece(g, data, cp, 0);
    Eigen::VectorXd x = solve_system(sys.M, rhs, Eigen::VectorXd::Zero(g.ncells()), params,
                                     "stationary", 0);
    return std::vector<double>(x.data(), x.data() + x.size());
}

DiscreteSolution solve(const DiscreteOperator& op, const ProblemData& data,
                       const SolverParams& params) {
    const Grid& g = op.grid();
    DiscreteSolution sol;
    sol.grid = g;
    sol.v = SpaceTimeField(g, g.nt);
    sol.bottom = BoundaryField(g);
    sol.top = BoundaryField(g);
    for (int ax = 0; ax < g.lat_axes(); ++ax)
        for (int s = 0; s < 2; ++s)
            sol.sides.v[ax][s].assign(
                static_cast<size_t>(g.nx0) * (ax == 0 ? g.nlat[1] : g.nlat[0]) * g.nt, 0.0);
    sol.residuals.assign(g.nt + 1, 0.0);

    double dmin = 1e300, dmax = -1e300;
    auto see = [&](double v) {
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
    };

    // initial slice
    if (params.initial_from_elliptic_extension) {
        std::vector<double> init = elliptic_extension(op, data, params);
        for (long c = 0; c < g.ncells(); ++c) {
            sol.v.at(c, 0) = init[c];
            see(init[c]);
        }
    } else {
        for (int j1 = 0; j1 < g.nlat[1]; ++j1)
            for (int j0 = 0; j0 < g.nlat[0]; ++j0)
                for (int i0 = 0; i0 < g.nx0; ++i0) {
                    double v = data.initial ? data.initial(g, i0, j0, j1) : 0.0;
                    sol.v.at(g.cell(i0, j0, j1), 0) = v;
                    see(v);
                }
    }

    // sample the applied boundary data (used by gradients and functionals)
    for (int k = 1; k <= g.nt; ++k) {
        for (int j1 = 0; j1 < g.nlat[1]; ++j1)
            for (int j0 = 0; j0 < g.nlat[0]; ++j0) {
                double b = data.bottom ? data.bottom(g, j0, j1, k) : 0.0;
                double t = data.top ? data.top(g, j0, j1, k) : 0.0;
                sol.bottom.at(j0, j1, k) = b;
                sol.top.at(j0, j1, k) = t;
                see(b);
                see(t);
            }
        for (int ax = 0; ax < g.lat_axes(); ++ax) {
            int nother = ax == 0 ? g.nlat[1] : g.nlat[0];
            long per_step = static_cast<long>(g.nx0) * nother;
            for (int s = 0; s < 2; ++s)
                for (int jo = 0; jo < nother; ++jo)
                    for (int i0 = 0; i0 < g.nx0; ++i0) {
                        double v = data.side ? data.side(g, ax, s, i0, jo, k) : 0.0;
                        sol.sides.v[ax][s][static_cast<size_t>(k - 1) * per_step +
                                           jo * g.nx0 + i0] = v;
                        see(v);
                    }
        }
    }
    sol.data_min = dmin;
    sol.data_max = dmax;

    Eigen::VectorXd prev(g.ncells());
    for (long c = 0; c < g.ncells(); ++c) prev[c] = sol.v.at(c, 0);

    for (int k = 1; k <= g.nt; ++k) {
        const auto& sys = op.step(k);
        Eigen::VectorXd rhs = prev;
        for (const auto& cp : sys.couplings)
            rhs[cp.cell] += g.ht * cp.w * eval_piece(g, data, cp, k);
        Eigen::VectorXd x = solve_system(sys.M, rhs, prev, params, "forward", k);
        double rn = rhs.norm();
        sol.residuals[k] = rn > 0.0 ? (sys.M * x - rhs).norm() / rn : 0.0;
        for (long c = 0; c < g.ncells(); ++c) sol.v.at(c, k) = x[c];
        prev.swap(x);
    }
    return sol;
}

MeasureWeights adjoint_measure_cell(const DiscreteOperator& op, long pole_cell, int pole_step,
                                    const SolverParams& params) {
    const Grid& g = op.grid();
    if (pole_step < 1 || pole_step > g.nt)
        throw ConfigError("pole time step outside the marching window");
    MeasureWeights w;
    w.grid = g;
    w.lateral = BoundaryField(g);
    w.pole_cell = pole_cell;
    w.pole_step = pole_step;

    Eigen::VectorXd lam = Eigen::VectorXd::Zero(g.ncells());
    lam[pole_cell] = 1.0;
    for (int k = pole_step; k >= 1; --k) {
        const auto& sys = op.step(k);
        Eigen::SparseMatrix<double> Mt = sys.M.transpose();
        Eigen::VectorXd y = solve_system(Mt, lam, lam, params, "adjoint", k);
        for (const auto& cp : sys.couplings) {
            double mass = g.ht * y[cp.cell] * cp.w;
            switch (cp.piece) {
                case Piece::Bottom:
                    w.lateral.at(cp.a, cp.b, k) += mass;
                    break;
                case Piece::Top:
                    w.top_mass += mass;
                    break;
                default:
                    w.side_mass += mass;
            }
        }
        lam.swap(y);
    }
    w.initial_mass = lam.sum();
    return w;
}

MeasureWeights adjoint_measure(const DiscreteOperator& op, const ParabolicPoint& pole,
                               const SolverParams& params) {
    const Grid& g = op.grid();
    int i0 = std::clamp(static_cast<int>(pole.x0 / g.h), 0, g.nx0 - 1);
    int j0 = 0, j1 = 0;
    if (g.n >= 2)
        j0 = std::clamp(static_cast<int>((pole.x[0] - g.lat_lo[0]) / g.hx), 0, g.nlat[0] - 1);
    if (g.n >= 3)
        j1 = std::clamp(static_cast<int>((pole.x[1] - g.lat_lo[1]) / g.hx), 0, g.nlat[1] - 1);
    int k = std::clamp(static_cast<int>(std::lround(pole.t / g.ht)), 1, g.nt);
    return adjoint_measure_cell(op, g.cell(i0, j0, j1), k, params);
}

GradientField spatial_gradient(const DiscreteSolution& sol) {
    const Grid& g = sol.grid;
    GradientField gf;
    gf.grid = g;
    for (int a = 0; a < g.n; ++a) gf.g[a] = SpaceTimeField(g, g.nt);

    for (int k = 1; k <= g.nt; ++k)
        for (int j1 = 0; j1 < g.nlat[1]; ++j1)
            for (int j0 = 0; j0 < g.nlat[0]; ++j0)
                for (int i0 = 0; i0 < g.nx0; ++i0) {
                    long c = g.cell(i0, j0, j1);
                    const int idx[3] = {i0, j0, j1};
                    const int nmax[3] = {g.nx0, g.nlat[0], g.nlat[1]};
                    for (int ax = 0; ax < g.n; ++ax) {
                        double d = g.spacing(ax);
                        double v = sol.v.at(c, k);
                        // upper face difference
                        double up, dn;
                        if (idx[ax] + 1 < nmax[ax]) {
                            int cc[3] = {i0, j0, j1};
                            cc[ax] += 1;
                            up = (sol.v.at(g.cell(cc[0], cc[1], cc[2]), k) - v) / d;
                        } else {
                            double bd = ax == 0 ? sol.top.at(j0, j1, k)
                                                : sol.side_at(ax - 1, 1, i0,
                                                              ax == 1 ? j1 : j0, k);
                            up = (bd - v) / (0.5 * d);
                        }
                        if (idx[ax] - 1 >= 0) {
                            int cc[3] = {i0, j0, j1};
                            cc[ax] -= 1;
                            dn = (v - sol.v.at(g.cell(cc[0], cc[1], cc[2]), k)) / d;
                        } else {
                            double bd = ax == 0 ? sol.bottom.at(j0, j1, k)
                                                : sol.side_at(ax - 1, 0, i0,
                                                              ax == 1 ? j1 : j0, k);
                            dn = (v - bd) / (0.5 * d);
                        }
                        gf.g[ax].at(c, k) = 0.5 * (up + dn);
                    }
                }
    return gf;
}

}  // namespace pmlab
