#include "pmlab/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace pmlab {

namespace {
inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }
}  // namespace

BoundaryField ntmax(const DiscreteSolution& sol, double aperture, double r) {
    const Grid& g = sol.grid;
    if (r <= 0.0) r = g.height();
    if (aperture <= 0.0 || r < 0.5 * g.h)
        throw NumericalError("degenerate aperture: cone contains no height level");
    BoundaryField out(g);
    int i0max = std::min(g.nx0 - 1, static_cast<int>(r / g.h - 0.5));
    for (int kb = 1; kb <= g.nt; ++kb)
        for (int jb1 = 0; jb1 < g.nlat[1]; ++jb1)
            for (int jb0 = 0; jb0 < g.nlat[0]; ++jb0) {
                double best = 0.0;
                for (int i0 = 0; i0 <= i0max; ++i0) {
                    double y0 = g.x0(i0);
                    double reach = aperture * y0;
                    bool any = false;
                    int w0 = g.n >= 2 ? static_cast<int>(reach / g.hx) : 0;
                    int w1 = g.n >= 3 ? w0 : 0;
                    for (int d1 = -w1; d1 <= w1; ++d1) {
                        int j1 = jb1 + d1;
                        if (j1 < 0 || j1 >= g.nlat[1]) continue;
                        for (int d0 = -w0; d0 <= w0; ++d0) {
                            int j0 = jb0 + d0;
                            if (j0 < 0 || j0 >= g.nlat[0]) continue;
                            double dy = 0.0;
                            if (g.n >= 2) dy += sqr(d0 * g.hx);
                            if (g.n >= 3) dy += sqr(d1 * g.hx);
                            dy = std::sqrt(dy);
                            double rem = reach - dy;
                            if (rem <= 0.0) continue;
                            double tw = rem * rem;
                            int klo = clampi(
                                static_cast<int>(std::ceil((g.time(kb) - tw) / g.ht + 1e-12)),
                                1, g.nt);
                            int khi = clampi(
                                static_cast<int>(std::floor((g.time(kb) + tw) / g.ht - 1e-12)),
                                1, g.nt);
                            long c = g.cell(i0, j0, j1);
                            for (int k = klo; k <= khi; ++k) {
                                double dt = std::abs(g.time(k) - g.time(kb));
                                if (dy + std::sqrt(dt) >= reach) continue;
                                any = true;
                                best = std::max(best, std::abs(sol.v.at(c, k)));
                            }
                        }
                    }
                    if (!any)  // vertex column fallback at thin heights
                        best = std::max(best, std::abs(sol.v.at(g.cell(i0, jb0, jb1), kb)));
                }
                out.at(jb0, jb1, kb) = best;
            }
    return out;
}

BoundaryField square_function(const DiscreteSolution& sol, const GradientField& grad,
                              double aperture, double r) {
    const Grid& g = sol.grid;
    if (r <= 0.0) r = g.height();
    if (aperture <= 0.0 || r < 0.5 * g.h)
        throw NumericalError("degenerate aperture: cone contains no height level");
    BoundaryField out(g);
    const double vol = g.cell_volume();
    int i0max = std::min(g.nx0 - 1, static_cast<int>(r / g.h - 0.5));
    const long nlat = g.nlateral();

    std::vector<double> pref(static_cast<size_t>(nlat) * (g.nt + 1));
    std::vector<double> acc(static_cast<size_t>(nlat) * g.nt, 0.0);
    std::vector<char> hit(static_cast<size_t>(nlat) * g.nt, 0);

    for (int i0 = 0; i0 <= i0max; ++i0) {
        double y0 = g.x0(i0);
        double weight = std::pow(y0, -g.n) * vol;
        // per lateral column, prefix sums of the weighted energy in time
        for (long jl = 0; jl < nlat; ++jl) {
            int j0 = static_cast<int>(jl % g.nlat[0]);
            int j1 = static_cast<int>(jl / g.nlat[0]);
            long c = g.cell(i0, j0, j1);
            double s = 0.0;
            pref[static_cast<size_t>(jl) * (g.nt + 1)] = 0.0;
            for (int k = 1; k <= g.nt; ++k) {
                s += grad.mag2(c, k) * weight;
                pref[static_cast<size_t>(jl) * (g.nt + 1) + k] = s;
            }
        }
        double reach = aperture * y0;
        int w0 = g.n >= 2 ? static_cast<int>(reach / g.hx) : 0;
        int w1 = g.n >= 3 ? w0 : 0;
        for (int jb1 = 0; jb1 < g.nlat[1]; ++jb1)
            for (int jb0 = 0; jb0 < g.nlat[0]; ++jb0) {
                long bl = jb0 + static_cast<long>(g.nlat[0]) * jb1;
                for (int d1 = -w1; d1 <= w1; ++d1) {
                    int j1 = jb1 + d1;
                    if (j1 < 0 || j1 >= g.nlat[1]) continue;
                    for (int d0 = -w0; d0 <= w0; ++d0) {
                        int j0 = jb0 + d0;
                        if (j0 < 0 || j0 >= g.nlat[0]) continue;
                        double dy = 0.0;
                        if (g.n >= 2) dy += sqr(d0 * g.hx);
                        if (g.n >= 3) dy += sqr(d1 * g.hx);
                        dy = std::sqrt(dy);
                        double rem = reach - dy;
                        if (rem <= 0.0) continue;
                        double tw = rem * rem;
                        long jl = j0 + static_cast<long>(g.nlat[0]) * j1;
                        for (int kb = 1; kb <= g.nt; ++kb) {
                            int klo = clampi(static_cast<int>(std::ceil(
                                                 (g.time(kb) - tw) / g.ht + 1e-12)),
                                             1, g.nt);
                            int khi = clampi(static_cast<int>(std::floor(
                                                 (g.time(kb) + tw) / g.ht - 1e-12)),
                                             1, g.nt);
                            if (khi < klo) continue;
                            acc[static_cast<size_t>(bl) * g.nt + (kb - 1)] +=
                                pref[static_cast<size_t>(jl) * (g.nt + 1) + khi] -
                                pref[static_cast<size_t>(jl) * (g.nt + 1) + klo - 1];
                            hit[static_cast<size_t>(bl) * g.nt + (kb - 1)] = 1;
                        }
                    }
                }
            }
        for (long bl = 0; bl < nlat; ++bl) {
            int jb0 = static_cast<int>(bl % g.nlat[0]);
            int jb1 = static_cast<int>(bl / g.nlat[0]);
            for (int kb = 1; kb <= g.nt; ++kb)
                if (!hit[static_cast<size_t>(bl) * g.nt + (kb - 1)])
                    acc[static_cast<size_t>(bl) * g.nt + (kb - 1)] +=
                        grad.mag2(g.cell(i0, jb0, jb1), kb) * weight;
        }
        std::fill(hit.begin(), hit.end(), 0);
    }

    for (int kb = 1; kb <= g.nt; ++kb)
        for (int jb1 = 0; jb1 < g.nlat[1]; ++jb1)
            for (int jb0 = 0; jb0 < g.nlat[0]; ++jb0) {
                long bl = jb0 + static_cast<long>(g.nlat[0]) * jb1;
                out.at(jb0, jb1, kb) =
                    std::sqrt(acc[static_cast<size_t>(bl) * g.nt + (kb - 1)]);
            }
    return out;
}

double sigma_ball(const Grid& grid, const BoundaryBall& ball) {
    auto cells = boundary_ball_cells(grid, ball);
    return static_cast<double>(cells.size()) * grid.sigma_cell();
}

double carleson_energy(const DiscreteSolution& sol, const GradientField& grad,
                       const BoundaryBall& ball) {
    const Grid& g = sol.grid;
    double sigma = sigma_ball(g, ball);
    if (sigma <= 0.0) return 0.0;
    double vol = g.cell_volume();
    double acc = 0.0;
    for (const CellRef& cr : carleson_region(g, ball)) {
        int i0, j0, j1;
        g.cell_coords(cr.cell, i0, j0, j1);
        acc += grad.mag2(cr.cell, cr.k) * g.x0(i0) * vol;
    }
    return acc / sigma;
}

CubeFamily dyadic_cube_family(const Grid& grid, double r_max, double burn_in_time) {
    CubeFamily fam;
    double r = r_max;
    while (r >= 2.0 * std::max(grid.n >= 2 ? grid.hx : 0.0, std::sqrt(grid.ht))) {
        double step_t = r * r;
        for (double s = burn_in_time + r * r; s + r * r <= grid.time_end() + 1e-12;
             s += step_t) {
            if (grid.n == 1) {
                fam.cubes.push_back({{0.0, 0.0}, s, r});
            } else {
                for (double y0 = grid.lat_lo[0] + r;
                     y0 + r <= grid.lat_lo[0] + grid.nlat[0] * grid.hx + 1e-12; y0 += r) {
                    if (grid.n == 2) {
                        fam.cubes.push_back({{y0, 0.0}, s, r});
                    } else {
                        for (double y1 = grid.lat_lo[1] + r;
                             y1 + r <= grid.lat_lo[1] + grid.nlat[1] * grid.hx + 1e-12;
                             y1 += r)
                            fam.cubes.push_back({{y0, y1}, s, r});
                    }
                }
            }
        }
        r *= 0.5;
    }
    return fam;
}

double carleson_norm(const CarlesonDensity& mu, const Grid& grid, const CubeFamily& family) {
    double worst = 0.0;
    double vol = grid.cell_volume();
    for (const ParabolicCube& q : family.cubes) {
        auto bcells = boundary_cube_cells(grid, q);
        if (bcells.empty()) continue;
        double sigma = static_cast<double>(bcells.size()) * grid.sigma_cell();
        int i0max = std::min(grid.nx0 - 1, static_cast<int>(q.r / grid.h - 0.5));
        double mass = 0.0;
        for (const BoundaryCell& bc : bcells)
            for (int i0 = 0; i0 <= i0max; ++i0)
                mass += mu.at(grid.cell(i0, bc.j0, bc.j1), bc.k) * vol;
        worst = std::max(worst, mass / sigma);
    }
    return worst;
}

namespace {

// max over matrix entries of max (or max-min) of an entry functional over
// cells intersecting B_{delta/2} around the cell
template <typename EntryFn>
double ball_entry_scan(const Grid& g, int i0, int j0, int j1, int k, EntryFn&& entry,
                       bool want_range, int nentries) {
    double rad = 0.5 * g.x0(i0);
    int wi = static_cast<int>(rad / g.h);
    int wl = g.n >= 2 ? static_cast<int>(rad / g.hx) : 0;
    int wk = static_cast<int>(rad * rad / g.ht);
    double worst = 0.0;
    for (int e = 0; e < nentries; ++e) {
        double mn = 1e300, mx = -1e300;
        for (int dk = -wk; dk <= wk; ++dk) {
            int kk = k + dk;
            if (kk < 1 || kk > g.nt) continue;
            double dt = std::abs(dk) * g.ht;
            for (int d1 = -(g.n >= 3 ? wl : 0); d1 <= (g.n >= 3 ? wl : 0); ++d1) {
                int jj1 = j1 + d1;
                if (jj1 < 0 || jj1 >= g.nlat[1]) continue;
                for (int d0 = -(g.n >= 2 ? wl : 0); d0 <= (g.n >= 2 ? wl : 0); ++d0) {
                    int jj0 = j0 + d0;
                    if (jj0 < 0 || jj0 >= g.nlat[0]) continue;
                    for (int di = -wi; di <= wi; ++di) {
                        int ii = i0 + di;
                        if (ii < 0 || ii >= g.nx0) continue;
                        double dist2 = sqr(di * g.h) + dt;
                        if (g.n >= 2) dist2 += sqr(d0 * g.hx);
                        if (g.n >= 3) dist2 += sqr(d1 * g.hx);
                        if (dist2 >= rad * rad) continue;
                        double v = entry(g.cell(ii, jj0, jj1), kk, e);
                        mn = std::min(mn, v);
                        mx = std::max(mx, v);
                    }
                }
            }
        }
        if (mx < mn) continue;
        worst = std::max(worst, want_range ? mx - mn : mx);
    }
    return worst;
}

int entry_row(int n, int e) {
    int q = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (q++ == e) return i;
    return 0;
}
int entry_col(int n, int e) {
    int q = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (q++ == e) return j;
    return 0;
}

}  // namespace

CarlesonDensity oscillation_density(const CoefficientField& A, const Grid& g) {
    CarlesonDensity d;
    d.grid = g;
    d.kind = DensityKind::Oscillation;
    d.gridcells = g.ncells();
    d.mu.assign(static_cast<size_t>(g.ncells()) * g.nt, 0.0);
    int nent = g.n * (g.n + 1) / 2;
    auto entry = [&](long cell, int k, int e) {
        return A.A(g, cell, k)(entry_row(g.n, e), entry_col(g.n, e));
    };
    for (int k = 1; k <= g.nt; ++k)
        for (long c = 0; c < g.ncells(); ++c) {
            int i0, j0, j1;
            g.cell_coords(c, i0, j0, j1);
            double osc = ball_entry_scan(g, i0, j0, j1, k, entry, true, nent);
            d.mu[static_cast<size_t>(k - 1) * g.ncells() + c] = sqr(osc) / g.x0(i0);
        }
    return d;
}

CarlesonDensity gradient_density(const CoefficientField& A, const Grid& g) {
    CarlesonDensity d;
    d.grid = g;
    d.kind = DensityKind::Gradient;
    d.gridcells = g.ncells();
    d.mu.assign(static_cast<size_t>(g.ncells()) * g.nt, 0.0);
    int nent = g.n * (g.n + 1) / 2;
    auto gradmag = [&](long cell, int k, int e) {
        int i0, j0, j1;
        g.cell_coords(cell, i0, j0, j1);
        int r = entry_row(g.n, e), cc = entry_col(g.n, e);
        double s = 0.0;
        const int idx[3] = {i0, j0, j1};
        const int nmax[3] = {g.nx0, g.nlat[0], g.nlat[1]};
        for (int ax = 0; ax < g.n; ++ax) {
            int lo = std::max(idx[ax] - 1, 0), hi = std::min(idx[ax] + 1, nmax[ax] - 1);
            if (hi == lo) continue;
            int c1[3] = {i0, j0, j1}, c2[3] = {i0, j0, j1};
            c1[ax] = lo;
            c2[ax] = hi;
            double v1 = A.A(g, g.cell(c1[0], c1[1], c1[2]), k)(r, cc);
            double v2 = A.A(g, g.cell(c2[0], c2[1], c2[2]), k)(r, cc);
            s += sqr((v2 - v1) / ((hi - lo) * g.spacing(ax)));
        }
        return std::sqrt(s);
    };
    for (int k = 1; k <= g.nt; ++k)
        for (long c = 0; c < g.ncells(); ++c) {
            int i0, j0, j1;
            g.cell_coords(c, i0, j0, j1);
            double sup = ball_entry_scan(g, i0, j0, j1, k, gradmag, false, nent);
            d.mu[static_cast<size_t>(k - 1) * g.ncells() + c] = g.x0(i0) * sqr(sup);
        }
    return d;
}

CarlesonDensity perturbation_density(const CoefficientField& A0, const CoefficientField& A2,
                                     const Grid& g) {
    CarlesonDensity d;
    d.grid = g;
    d.kind = DensityKind::Perturbation;
    d.gridcells = g.ncells();
    d.mu.assign(static_cast<size_t>(g.ncells()) * g.nt, 0.0);
    int nent = g.n * (g.n + 1) / 2;
    auto diff = [&](long cell, int k, int e) {
        int r = entry_row(g.n, e), cc = entry_col(g.n, e);
        return std::abs(A0.A(g, cell, k)(r, cc) - A2.A(g, cell, k)(r, cc));
    };
    for (int k = 1; k <= g.nt; ++k)
        for (long c = 0; c < g.ncells(); ++c) {
            int i0, j0, j1;
            g.cell_coords(c, i0, j0, j1);
            double sup = ball_entry_scan(g, i0, j0, j1, k, diff, false, nent);
            d.mu[static_cast<size_t>(k - 1) * g.ncells() + c] =
                std::pow(g.x0(i0), -2.0 - g.n) * sqr(sup);
        }
    return d;
}

double perturbation_carleson(const CoefficientField& A0, const CoefficientField& A2,
                             const Grid& g, double aperture, double r,
                             const std::vector<BoundaryBall>& balls) {
    CarlesonDensity d = perturbation_density(A0, A2, g);
    BoundaryField area(g);
    double vol = g.cell_volume();
    int i0max = std::min(g.nx0 - 1, static_cast<int>(r / g.h - 0.5));
    for (int kb = 1; kb <= g.nt; ++kb)
        for (int jb1 = 0; jb1 < g.nlat[1]; ++jb1)
            for (int jb0 = 0; jb0 < g.nlat[0]; ++jb0) {
                double acc = 0.0;
                for (int i0 = 0; i0 <= i0max; ++i0) {
                    double reach = aperture * g.x0(i0);
                    int w0 = g.n >= 2 ? static_cast<int>(reach / g.hx) : 0;
                    int w1 = g.n >= 3 ? w0 : 0;
                    for (int d1 = -w1; d1 <= w1; ++d1)
                        for (int d0 = -w0; d0 <= w0; ++d0) {
                            int j0 = jb0 + d0, j1 = jb1 + d1;
                            if (j0 < 0 || j0 >= g.nlat[0] || j1 < 0 || j1 >= g.nlat[1])
                                continue;
                            double dy = 0.0;
                            if (g.n >= 2) dy += sqr(d0 * g.hx);
                            if (g.n >= 3) dy += sqr(d1 * g.hx);
                            dy = std::sqrt(dy);
                            double rem = reach - dy;
                            if (rem <= 0.0) continue;
                            double tw = rem * rem;
                            int klo = clampi(
                                static_cast<int>(std::ceil((g.time(kb) - tw) / g.ht)), 1,
                                g.nt);
                            int khi = clampi(
                                static_cast<int>(std::floor((g.time(kb) + tw) / g.ht)), 1,
                                g.nt);
                            for (int k = klo; k <= khi; ++k)
                                acc += d.at(g.cell(i0, j0, j1), k) * vol;
                        }
                }
                area.at(jb0, jb1, kb) = acc;
            }
    double worst = 0.0;
    for (const BoundaryBall& b : balls) {
        auto cells = boundary_ball_cells(g, b);
        if (cells.empty()) continue;
        double s = 0.0;
        for (const BoundaryCell& bc : cells) s += area.at(bc.j0, bc.j1, bc.k) * g.sigma_cell();
        worst = std::max(worst, s / (static_cast<double>(cells.size()) * g.sigma_cell()));
    }
    return worst;
}

double bmo_norm(const BoundaryField& f, const Grid& g) {
    double worst = 0.0;
    int mmax =
        g.n >= 2 ? g.nlat[0] : static_cast<int>(std::sqrt(g.nt * g.ht) / std::max(g.hx, 1e-12)) + 1;
    if (g.n == 1) mmax = 1 << 20;  // scale walk terminates on the time window below
    for (int m = 1; m <= std::max(mmax, 2); m *= 2) {
        long wt;
        if (g.n >= 2)
            wt = std::max(1l, std::lround(sqr(m * g.hx) / g.ht));
        else
            wt = m;  // n=1: windows are time intervals, dyadic cell counts
        if (wt > g.nt) wt = g.nt;
        int wl = g.n >= 2 ? std::min(m, g.nlat[0]) : 1;
        int w1 = g.n >= 3 ? std::min(m, g.nlat[1]) : 1;
        long step_t = std::max<long>(1, wt / 2);
        int step_l = std::max(1, wl / 2);
        for (long k = 1; k + wt - 1 <= g.nt; k += step_t)
            for (int j1 = 0; j1 + w1 - 1 < g.nlat[1]; j1 += step_l)
                for (int j0 = 0; j0 + wl - 1 < g.nlat[0]; j0 += step_l) {
                    double sum = 0.0;
                    long cnt = 0;
                    for (long kk = k; kk < k + wt; ++kk)
                        for (int q1 = j1; q1 < j1 + w1; ++q1)
                            for (int q0 = j0; q0 < j0 + wl; ++q0) {
                                sum += f.at(q0, q1, static_cast<int>(kk));
                                ++cnt;
                            }
                    double mean = sum / cnt;
                    double osc = 0.0;
                    for (long kk = k; kk < k + wt; ++kk)
                        for (int q1 = j1; q1 < j1 + w1; ++q1)
                            for (int q0 = j0; q0 < j0 + wl; ++q0)
                                osc += std::abs(f.at(q0, q1, static_cast<int>(kk)) - mean);
                    worst = std::max(worst, osc / cnt);
                }
        if (wt >= g.nt && wl >= g.nlat[0] && w1 >= g.nlat[1]) break;
    }
    return worst;
}

}  // namespace pmlab
