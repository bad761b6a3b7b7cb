#include "pmlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmlab {

KernelDensity kernel_density(const MeasureWeights& w) {
    KernelDensity kd;
    kd.grid = w.grid;
    kd.omega = w.lateral;
    kd.K = w.lateral;
    double sc = w.grid.sigma_cell();
    for (double& v : kd.K.v) v /= sc;
    kd.top_mass = w.top_mass;
    kd.side_mass = w.side_mass;
    kd.initial_mass = w.initial_mass;
    kd.pole_cell = w.pole_cell;
    kd.pole_step = w.pole_step;
    return kd;
}

double parabolic_measure(const BoundaryField& weights, const std::vector<BoundaryCell>& E) {
    double s = 0.0;
    for (const BoundaryCell& c : E) s += weights.at(c.j0, c.j1, c.k);
    return s;
}

double parabolic_measure(const KernelDensity& K, const std::vector<BoundaryCell>& E) {
    return parabolic_measure(K.omega, E);
}

DoublingTable doubling_table(const KernelDensity& K, const BoundaryBall& smallest, int octaves,
                             double mass_tol) {
    DoublingTable t;
    const Grid& g = K.grid;
    for (int i = 0; i <= octaves; ++i) {
        BoundaryBall b = smallest;
        b.r = smallest.r * std::pow(2.0, i);
        t.radii.push_back(b.r);
        t.omega_r.push_back(parabolic_measure(K, boundary_ball_cells(g, b)));
    }
    for (int i = 0; i < octaves; ++i) {
        if (t.omega_r[i] <= mass_tol) {
            ++t.excluded;
            t.ratios.push_back(0.0);
            continue;
        }
        double r = t.omega_r[i + 1] / t.omega_r[i];
        t.ratios.push_back(r);
        t.max_ratio = std::max(t.max_ratio, r);
    }
    return t;
}

namespace {

struct BallCells {
    std::vector<double> om;   // per-cell omega, sorted by K ascending
    std::vector<double> sig;  // matching sigma
    double om_total = 0.0, sig_total = 0.0;
};

BallCells collect_sorted(const KernelDensity& K, const BoundaryBall& ball) {
    const Grid& g = K.grid;
    auto cells = boundary_ball_cells(g, ball);
    BallCells bc;
    std::vector<std::pair<double, double>> kv;  // (K, omega)
    kv.reserve(cells.size());
    double sc = g.sigma_cell();
    for (const BoundaryCell& c : cells) {
        kv.emplace_back(K.K.at(c.j0, c.j1, c.k), K.omega.at(c.j0, c.j1, c.k));
        bc.om_total += K.omega.at(c.j0, c.j1, c.k);
        bc.sig_total += sc;
    }
    std::sort(kv.begin(), kv.end());
    bc.om.reserve(kv.size());
    bc.sig.reserve(kv.size());
    for (auto& [k, o] : kv) {
        bc.om.push_back(o);
        bc.sig.push_back(sc);
    }
    return bc;
}

// continuous-knapsack optimum: max sigma-fraction with omega-fraction <= delta
double greedy_fraction(const BallCells& bc, double delta) {
    if (bc.om_total <= 0.0 || bc.sig_total <= 0.0) return 0.0;
    double budget = delta * bc.om_total;
    double sig = 0.0, om = 0.0;
    for (size_t i = 0; i < bc.om.size(); ++i) {
        if (om + bc.om[i] <= budget) {
            om += bc.om[i];
            sig += bc.sig[i];
        } else {
            double rem = budget - om;
            if (bc.om[i] > 0.0 && rem > 0.0) sig += bc.sig[i] * (rem / bc.om[i]);
            break;
        }
    }
    return sig / bc.sig_total;
}

}  // namespace

double ainfty_greedy(const KernelDensity& K, const BoundaryBall& ball, double delta) {
    return greedy_fraction(collect_sorted(K, ball), delta);
}

double ainfty_bruteforce(const KernelDensity& K, const BoundaryBall& ball, double delta) {
    const Grid& g = K.grid;
    auto cells = boundary_ball_cells(g, ball);
    if (cells.size() > 22)
        throw NumericalError("brute-force subset scan limited to 22 cells");
    double sc = g.sigma_cell();
    double om_total = 0.0;
    std::vector<double> om(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
        om[i] = K.omega.at(cells[i].j0, cells[i].j1, cells[i].k);
        om_total += om[i];
    }
    if (om_total <= 0.0) return 0.0;
    double budget = delta * om_total;
    double best = 0.0;
    const unsigned long nsub = 1ul << cells.size();
    for (unsigned long mask = 0; mask < nsub; ++mask) {
        double o = 0.0;
        int cnt = 0;
        for (size_t i = 0; i < cells.size(); ++i)
            if (mask & (1ul << i)) {
                o += om[i];
                ++cnt;
            }
        if (o <= budget) best = std::max(best, cnt * sc / (cells.size() * sc));
    }
    return best;
}

AinftyTable ainfty_scan(const KernelDensity& K, const std::vector<BoundaryBall>& balls,
                        const std::vector<double>& deltas) {
    AinftyTable table;
    std::vector<BallCells> cached;
    cached.reserve(balls.size());
    for (const BoundaryBall& b : balls) cached.push_back(collect_sorted(K, b));
    for (double d : deltas) {
        AinftyRow row;
        row.delta = d;
        row.epsilon = 0.0;
        for (const BallCells& bc : cached) {
            double eps = greedy_fraction(bc, d);
            row.per_ball.push_back(eps);
            row.epsilon = std::max(row.epsilon, eps);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

double reverse_holder(const KernelDensity& K, double p, const std::vector<BoundaryBall>& balls) {
    if (p <= 1.0) throw ConfigError("reverse Holder exponent must exceed 1");
    const Grid& g = K.grid;
    double sc = g.sigma_cell();
    double worst = 0.0;
    for (const BoundaryBall& b : balls) {
        auto cells = boundary_ball_cells(g, b);
        if (cells.empty()) continue;
        double sp = 0.0, s1 = 0.0, sig = 0.0;
        for (const BoundaryCell& c : cells) {
            double k = K.K.at(c.j0, c.j1, c.k);
            sp += std::pow(std::max(k, 0.0), p) * sc;
            s1 += k * sc;
            sig += sc;
        }
        if (s1 <= 0.0) continue;
        double q = std::pow(sp / sig, 1.0 / p) / (s1 / sig);
        worst = std::max(worst, q);
    }
    return worst;
}

double best_p(const KernelDensity& K, const std::vector<BoundaryBall>& balls, double cap,
              double bound) {
    double lo = 1.0 + 1e-9, hi = cap;
    if (reverse_holder(K, hi, balls) <= bound) return hi;
    for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        if (reverse_holder(K, mid, balls) <= bound)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace pmlab
