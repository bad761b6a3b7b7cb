#include "pmlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pmlab {

DyadicTree::DyadicTree(const Grid& grid, const BoundaryField& omega, std::array<int, 2> j_lo,
                       std::array<int, 2> j_cnt, int k_lo, int k_cnt, int max_depth)
    : grid_(grid), omega_(&omega), root_j_lo_(j_lo), root_j_cnt_(j_cnt), root_k_lo_(k_lo),
      root_k_cnt_(k_cnt) {
    if (k_lo < 1 || k_lo + k_cnt - 1 > grid.nt)
        throw ConfigError("dyadic root outside the time range");
    build(0, j_lo, j_cnt, k_lo, k_cnt, -1, max_depth);
    // atom lookup per boundary cell of the root region
    atom_index_.assign(static_cast<size_t>(j_cnt[0]) * j_cnt[1] * k_cnt, -1);
    for (long id : atoms_) {
        const DyadicCube& c = cubes_[id];
        for (int k = c.k_lo; k < c.k_lo + c.k_cnt; ++k)
            for (int j1 = c.j_lo[1]; j1 < c.j_lo[1] + c.j_cnt[1]; ++j1)
                for (int j0 = c.j_lo[0]; j0 < c.j_lo[0] + c.j_cnt[0]; ++j0) {
                    long idx = (j0 - root_j_lo_[0]) +
                               static_cast<long>(root_j_cnt_[0]) *
                                   ((j1 - root_j_lo_[1]) +
                                    static_cast<long>(root_j_cnt_[1]) * (k - root_k_lo_));
                    atom_index_[idx] = id;
                }
    }
    omega_ = nullptr;
}

long DyadicTree::build(int depth, std::array<int, 2> j_lo, std::array<int, 2> j_cnt, int k_lo,
                       int k_cnt, long parent, int max_depth) {
    long id = static_cast<long>(cubes_.size());
    cubes_.emplace_back();
    {
        DyadicCube& c = cubes_.back();
        c.depth = depth;
        c.j_lo = j_lo;
        c.j_cnt = j_cnt;
        c.k_lo = k_lo;
        c.k_cnt = k_cnt;
        c.parent = parent;
        const Grid& g = grid_;
        for (int a = 0; a < 2; ++a)
            c.center[a] = a < g.lat_axes()
                              ? g.lat_lo[a] + (j_lo[a] + 0.5 * j_cnt[a]) * g.hx - 0.5 * g.hx +
                                    0.5 * g.hx
                              : 0.0;
        // region center: left cell edge + half the region extent
        if (g.lat_axes() >= 1)
            c.center[0] = g.lat_lo[0] + j_lo[0] * g.hx + 0.5 * j_cnt[0] * g.hx;
        if (g.lat_axes() >= 2)
            c.center[1] = g.lat_lo[1] + j_lo[1] * g.hx + 0.5 * j_cnt[1] * g.hx;
        c.center_t = g.time(k_lo) - 0.5 * g.ht + 0.5 * k_cnt * g.ht;
        double half_t = 0.5 * k_cnt * g.ht;
        double half_l = g.lat_axes() >= 1 ? 0.5 * j_cnt[0] * g.hx : 0.0;
        c.r = g.lat_axes() >= 1 ? std::max(half_l, std::sqrt(half_t)) : std::sqrt(half_t);
        double om = 0.0;
        for (int k = k_lo; k < k_lo + k_cnt; ++k)
            for (int j1 = j_lo[1]; j1 < j_lo[1] + j_cnt[1]; ++j1)
                for (int j0 = j_lo[0]; j0 < j_lo[0] + j_cnt[0]; ++j0)
                    om += omega_->at(j0, j1, k);
        c.omega = om;
        c.sigma = static_cast<double>(j_cnt[0]) * j_cnt[1] * k_cnt * g.sigma_cell();
    }

    bool lat_ok = true;
    for (int a = 0; a < grid_.lat_axes(); ++a)
        if (j_cnt[a] % 2 != 0 || j_cnt[a] < 2) lat_ok = false;
    bool time_ok = k_cnt % 4 == 0 && k_cnt >= 4;
    if (depth < max_depth && lat_ok && time_ok) {
        int l0 = grid_.lat_axes() >= 1 ? 2 : 1;
        int l1 = grid_.lat_axes() >= 2 ? 2 : 1;
        std::vector<long> kids;
        for (int q = 0; q < 4; ++q)
            for (int b1 = 0; b1 < l1; ++b1)
                for (int b0 = 0; b0 < l0; ++b0) {
                    std::array<int, 2> cj_lo = {j_lo[0] + b0 * j_cnt[0] / 2,
                                                j_lo[1] + b1 * j_cnt[1] / 2};
                    std::array<int, 2> cj_cnt = {l0 == 2 ? j_cnt[0] / 2 : j_cnt[0],
                                                 l1 == 2 ? j_cnt[1] / 2 : j_cnt[1]};
                    kids.push_back(build(depth + 1, cj_lo, cj_cnt, k_lo + q * k_cnt / 4,
                                         k_cnt / 4, id, max_depth));
                }
        cubes_[id].children = std::move(kids);
    } else {
        atoms_.push_back(id);
        max_depth_ = std::max(max_depth_, depth);
    }
    return id;
}

long DyadicTree::atom_of(int j0, int j1, int k) const {
    if (j0 < root_j_lo_[0] || j0 >= root_j_lo_[0] + root_j_cnt_[0]) return -1;
    if (j1 < root_j_lo_[1] || j1 >= root_j_lo_[1] + root_j_cnt_[1]) return -1;
    if (k < root_k_lo_ || k >= root_k_lo_ + root_k_cnt_) return -1;
    long idx = (j0 - root_j_lo_[0]) +
               static_cast<long>(root_j_cnt_[0]) *
                   ((j1 - root_j_lo_[1]) + static_cast<long>(root_j_cnt_[1]) * (k - root_k_lo_));
    return atom_index_[idx];
}

double DyadicTree::masked_omega(long cube_id, const std::vector<char>& atom_mask) const {
    const DyadicCube& c = cubes_[cube_id];
    if (c.children.empty()) {
        return atom_mask[cube_id] ? c.omega : 0.0;
    }
    double s = 0.0;
    for (long k : c.children) s += masked_omega(k, atom_mask);
    return s;
}

std::vector<BoundaryCell> DyadicTree::cells_of(long cube_id) const {
    const DyadicCube& c = cubes_[cube_id];
    std::vector<BoundaryCell> out;
    out.reserve(static_cast<size_t>(c.j_cnt[0]) * c.j_cnt[1] * c.k_cnt);
    for (int k = c.k_lo; k < c.k_lo + c.k_cnt; ++k)
        for (int j1 = c.j_lo[1]; j1 < c.j_lo[1] + c.j_cnt[1]; ++j1)
            for (int j0 = c.j_lo[0]; j0 < c.j_lo[0] + c.j_cnt[0]; ++j0)
                out.push_back({j0, j1, k});
    return out;
}

namespace {

// E-mass per cube, bottom-up
void accumulate_masked(const DyadicTree& t, long id, const std::vector<char>& mask,
                       std::vector<double>& out) {
    const DyadicCube& c = t.cube(id);
    if (c.children.empty()) {
        out[id] = mask[id] ? c.omega : 0.0;
        return;
    }
    double s = 0.0;
    for (long k : c.children) {
        accumulate_masked(t, k, mask, out);
        s += out[k];
    }
    out[id] = s;
}

// maximal descendants D of S with Em(D) >= q * omega(D)
void collect_maximal(const DyadicTree& t, long id, double q, const std::vector<double>& em,
                     std::vector<long>& out) {
    const DyadicCube& c = t.cube(id);
    if (em[id] <= 0.0) return;
    if (c.omega > 0.0 && em[id] >= q * c.omega) {
        out.push_back(id);
        return;
    }
    for (long k : c.children) collect_maximal(t, k, q, em, out);
}

}  // namespace

GoodCover good_cover(const DyadicTree& tree, const std::vector<long>& E_atoms, double eps0) {
    if (eps0 <= 0.0 || eps0 >= 1.0) throw ConfigError("eps0 must lie in (0,1)");
    std::vector<char> mask(tree.size(), 0);
    for (long a : E_atoms) mask[a] = 1;
    std::vector<double> em(tree.size(), 0.0);
    accumulate_masked(tree, tree.root(), mask, em);

    GoodCover cover;
    cover.eps0 = eps0;
    const double root_omega = tree.cube(tree.root()).omega;
    if (root_omega <= 0.0) throw NumericalError("root carries no measure");
    cover.delta0 = em[tree.root()] / root_omega;
    if (cover.delta0 >= eps0)
        throw NumericalError("good cover requires omega(E)/omega(root) < eps0");

    cover.levels.push_back({tree.root()});
    const double guard = 1.0 + 1e-10;
    for (int l = 1; l <= 64; ++l) {
        std::vector<long> next;
        bool saturated = false;
        for (long S : cover.levels.back()) {
            const DyadicCube& cs = tree.cube(S);
            if (em[S] <= 0.0) continue;
            if (em[S] * guard * guard > eps0 * cs.omega) {
                saturated = true;
                break;
            }
            double q = em[S] * guard / (eps0 * cs.omega);
            collect_maximal(tree, S, q, em, next);
        }
        if (saturated || next.empty()) break;
        cover.levels.push_back(std::move(next));
    }

    std::string why;
    if (!verify_good_cover(tree, cover, E_atoms, &why))
        throw NumericalError("good cover verification failed: " + why);
    return cover;
}

bool verify_good_cover(const DyadicTree& tree, const GoodCover& cover,
                       const std::vector<long>& E_atoms, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (cover.levels.empty() || cover.levels[0] != std::vector<long>{tree.root()})
        return fail("level 0 is not the root");

    // nesting and the exact sparsity property
    int k = cover.length();
    for (int l = 1; l <= k; ++l) {
        for (long S : cover.levels[l - 1]) {
            const DyadicCube& cs = tree.cube(S);
            double mass = 0.0;
            for (long D : cover.levels[l]) {
                const DyadicCube& cd = tree.cube(D);
                bool inside = cs.contains(cd);
                // a cover cube of level l must be inside exactly one cube of
                // level l-1
                if (inside) mass += cd.omega;
            }
            if (mass > cover.eps0 * cs.omega)
                return fail("sparsity violated at level " + std::to_string(l));
        }
        // every level-l cube must lie in some level-(l-1) cube
        for (long D : cover.levels[l]) {
            bool found = false;
            for (long S : cover.levels[l - 1])
                if (tree.cube(S).contains(tree.cube(D))) found = true;
            if (!found) return fail("nesting violated at level " + std::to_string(l));
        }
    }
    // iterated sparsity omega(S^m cap O_l) <= eps0^{l-m} omega(S^m)
    for (int m = 0; m < k; ++m)
        for (long S : cover.levels[m]) {
            const DyadicCube& cs = tree.cube(S);
            for (int l = m + 1; l <= k; ++l) {
                double mass = 0.0;
                for (long D : cover.levels[l])
                    if (cs.contains(tree.cube(D))) mass += tree.cube(D).omega;
                if (mass > std::pow(cover.eps0, l - m) * cs.omega * (1.0 + 1e-9))
                    return fail("iterated sparsity violated");
            }
        }
    // E containment in every level
    for (int l = 0; l <= k; ++l) {
        for (long a : E_atoms) {
            const DyadicCube& ca = tree.cube(a);
            bool found = false;
            for (long D : cover.levels[l])
                if (tree.cube(D).contains(ca)) {
                    found = true;
                    break;
                }
            if (!found) return fail("E escapes level " + std::to_string(l));
        }
    }
    return true;
}

namespace {

// boundary cells with centers in the box |y - c| < wl, |s - ct| < wt
void for_box_cells(const Grid& g, const std::array<double, 2>& c, double wl, double ct,
                   double wt, const std::function<void(int, int, int)>& fn) {
    int klo = std::max(1, static_cast<int>(std::ceil((ct - wt) / g.ht - 1e-12)));
    int khi = std::min(g.nt, static_cast<int>(std::floor((ct + wt) / g.ht + 1e-12)));
    for (int k = klo; k <= khi; ++k) {
        if (std::abs(g.time(k) - ct) >= wt) continue;
        if (g.n == 1) {
            fn(0, 0, k);
            continue;
        }
        for (int j1 = 0; j1 < g.nlat[1]; ++j1) {
            if (g.n >= 3 && std::abs(g.lat(1, j1) - c[1]) >= wl) continue;
            for (int j0 = 0; j0 < g.nlat[0]; ++j0) {
                if (std::abs(g.lat(0, j0) - c[0]) >= wl) continue;
                fn(j0, j1, k);
            }
        }
    }
}

}  // namespace

OscillationData oscillation_test_data(const DyadicTree& tree, const GoodCover& cover,
                                      double rho, int k_skip) {
    if (rho <= 0.0 || rho >= 1.0) throw ConfigError("rho must lie in (0,1)");
    const Grid& g = tree.grid();
    OscillationData od;
    od.rho = rho;
    od.k_skip = k_skip;
    od.f = BoundaryField(g);
    int k = cover.length();

    // mask of O_{m} cells per level for the alternating correction
    auto level_mask = [&](int m) {
        std::vector<char> mask(static_cast<size_t>(g.nlateral()) * g.nt, 0);
        for (long D : cover.levels[m])
            for (const BoundaryCell& bc : tree.cells_of(D))
                mask[(bc.k - 1) * g.nlateral() + bc.j1 * g.nlat[0] + bc.j0] = 1;
        return mask;
    };

    for (int m = 0; m <= k; m += 2) {
        std::vector<LevelBox> boxes;
        std::vector<char> next_mask;
        if (m + 1 <= k) next_mask = level_mask(m + 1);
        for (long S : cover.levels[m]) {
            const DyadicCube& cs = tree.cube(S);
            LevelBox lb;
            lb.cube = S;
            lb.r = cs.r;
            lb.rp = cs.r / std::sqrt(2.0);
            lb.rpp = lb.rp / 4.0;
            lb.y = cs.center;
            lb.s = cs.center_t;
            // resolution: H box needs >= 4 time cells and the A box >= 1 height
            double h_time_span = 0.5 * sqr(lb.rpp);
            lb.resolved = h_time_span >= 4.0 * g.ht && (lb.rp - rho * lb.rp) >= g.h &&
                          (g.n == 1 || 2.0 * lb.rpp >= 4.0 * g.hx);
            boxes.push_back(lb);
            // f_m = 1 on the shifted cube Delta' = Q_{r'}(y, s - r'^2)
            for_box_cells(g, cs.center, lb.rp, cs.center_t - sqr(lb.rp), sqr(lb.rp),
                          [&](int j0, int j1, int kk) {
                              double& v = od.f.at(j0, j1, kk);
                              v += 1.0;
                              if (m + 1 <= k) {
                                  long idx = (kk - 1) * g.nlateral() + j1 * g.nlat[0] + j0;
                                  if (next_mask[idx]) v -= 1.0;  // f_{m+1} correction
                              }
                          });
        }
        od.even_levels.push_back(std::move(boxes));
    }

    // the alternating construction keeps values in [0,1]
    for (double v : od.f.v)
        if (v < -1e-12 || v > 1.0 + 1e-12)
            throw NumericalError("alternating data escaped [0,1]");
    return od;
}

LowerBoundReport lower_bound_experiment(const DyadicTree& tree, const GoodCover& cover,
                                        const OscillationData& data,
                                        const DiscreteSolution& sol, const GradientField& grad,
                                        const std::vector<long>& E_atoms) {
    const Grid& g = sol.grid;
    LowerBoundReport rep;
    rep.cover_length = cover.length();
    double vol = g.cell_volume();

    // per-box statistics and A-box integrals
    std::vector<std::vector<double>> box_integral(data.even_levels.size());
    int resolved_cnt = 0, margin_pos = 0;
    for (size_t lm = 0; lm < data.even_levels.size(); ++lm) {
        box_integral[lm].assign(data.even_levels[lm].size(), 0.0);
        for (size_t bi = 0; bi < data.even_levels[lm].size(); ++bi) {
            const LevelBox& lb = data.even_levels[lm][bi];
            BoxStats bs;
            bs.level = static_cast<int>(2 * lm);
            bs.cube = lb.cube;
            bs.resolved = lb.resolved;
            // H box: |y - y^m| <= r'', 1/2 r''^2 <= s - (s^m + r'^2) <= r''^2
            double ct = lb.s + sqr(lb.rp) + 0.75 * sqr(lb.rpp);
            double wt = 0.25 * sqr(lb.rpp);
            int i_top = std::clamp(static_cast<int>(lb.rp / g.h), 0, g.nx0 - 1);
            int i_bot = std::clamp(static_cast<int>(data.rho * lb.rp / g.h), 0, g.nx0 - 1);
            double top_min = 1e300, bot_max = -1e300, margin = 1e300;
            bool any = false;
            for_box_cells(g, lb.y, lb.rpp, ct, wt, [&](int j0, int j1, int kk) {
                double ut = sol.v.at(g.cell(i_top, j0, j1), kk);
                double ub = sol.v.at(g.cell(i_bot, j0, j1), kk);
                top_min = std::min(top_min, ut);
                bot_max = std::max(bot_max, ub);
                margin = std::min(margin, ut - ub);
                any = true;
            });
            if (!any) bs.resolved = false;
            bs.u_top_min = any ? top_min : 0.0;
            bs.u_bot_max = any ? bot_max : 0.0;
            bs.margin = any ? margin : 0.0;
            // A box integral: rho r' < y0 < r' over the H cells
            double integ = 0.0;
            int ia_lo = static_cast<int>(data.rho * lb.rp / g.h);  // first center above
            int ia_hi = std::min(g.nx0 - 1, static_cast<int>(lb.rp / g.h - 0.5));
            for_box_cells(g, lb.y, lb.rpp, ct, wt, [&](int j0, int j1, int kk) {
                for (int i0 = ia_lo; i0 <= ia_hi; ++i0) {
                    double y0 = g.x0(i0);
                    if (y0 <= data.rho * lb.rp || y0 >= lb.rp) continue;
                    integ += std::pow(y0, -g.n) * grad.mag2(g.cell(i0, j0, j1), kk) * vol;
                }
            });
            bs.box_integral = integ;
            box_integral[lm][bi] = integ;
            if (bs.resolved) {
                ++resolved_cnt;
                if (bs.margin > 0.0) ++margin_pos;
            }
            rep.boxes.push_back(bs);
        }
    }
    rep.margin_positive_fraction =
        resolved_cnt > 0 ? static_cast<double>(margin_pos) / resolved_cnt : 0.0;

    // per-E-cell tally with the greedy disjoint level selection
    // (rho r'_{selected} > r'_{next}); disjointness of the A height intervals
    // is implied and checked
    double ap_needed = 0.0;
    for (long a : E_atoms) {
        const DyadicCube& atom = tree.cube(a);
        // representative boundary cell of the atom
        int j0 = atom.j_lo[0], j1 = atom.j_lo[1], kk = atom.k_lo;
        double x[2] = {g.n >= 2 ? g.lat(0, j0) : 0.0, g.n >= 3 ? g.lat(1, j1) : 0.0};
        double t = g.time(kk);
        double tally = 0.0;
        int J = 0;
        double last_rp = 1e300;
        double prev_lo = 1e300;
        for (size_t lm = 0; lm < data.even_levels.size(); ++lm) {
            // find the level-m cube containing this atom
            int found = -1;
            for (size_t bi = 0; bi < data.even_levels[lm].size(); ++bi)
                if (tree.cube(data.even_levels[lm][bi].cube).contains(atom)) {
                    found = static_cast<int>(bi);
                    break;
                }
            if (found < 0) continue;
            const LevelBox& lb = data.even_levels[lm][found];
            if (!lb.resolved) continue;
            if (lb.rp >= data.rho * last_rp && J > 0) continue;  // not separated yet
            // disjointness guard on the A height intervals
            double lo = data.rho * lb.rp, hi = lb.rp;
            if (J > 0 && hi > prev_lo)
                throw NumericalError("selected oscillation boxes overlap in height");
            prev_lo = lo;
            last_rp = lb.rp;
            ++J;
            tally += box_integral[lm][found];
            // aperture needed so the A box sits in the cone over (x,t)
            double dy = 0.0;
            if (g.n >= 2) dy = std::abs(lb.y[0] - x[0]) + lb.rpp;
            if (g.n >= 3) dy += std::abs(lb.y[1] - x[1]) + lb.rpp;
            double dt = std::abs(lb.s + sqr(lb.rp) + sqr(lb.rpp) - t);
            ap_needed = std::max(ap_needed, (dy + std::sqrt(dt)) / (data.rho * lb.rp));
        }
        rep.tally.push_back(tally);
        rep.selected.push_back(J);
    }
    rep.aperture_needed = ap_needed;

    // c_meas = 10th percentile of tally/J
    std::vector<double> ratios;
    for (size_t i = 0; i < rep.tally.size(); ++i)
        if (rep.selected[i] > 0) ratios.push_back(rep.tally[i] / rep.selected[i]);
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        rep.c_meas = ratios[static_cast<size_t>(0.1 * (ratios.size() - 1))];
        long pass = 0;
        for (size_t i = 0; i < rep.tally.size(); ++i)
            if (rep.selected[i] > 0 && rep.tally[i] >= rep.c_meas * rep.selected[i]) ++pass;
        rep.pass_fraction = static_cast<double>(pass) / ratios.size();
    }
    return rep;
}

}  // namespace pmlab
