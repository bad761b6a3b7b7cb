#include "pmlab/exponents.hpp"

#include <algorithm>
#include <cmath>

namespace pmlab {

double epsilon_of_beta(double C, double K, double beta) {
    if (beta <= 0.0 || beta >= 1.0) throw ConfigError("beta must lie in (0,1)");
    return C * (1.0 + K) / (-std::log(beta));
}

namespace {
double g_of(double c, double eps, double beta, double d) {
    return d * c - (1.0 - eps) * std::pow(beta, 1.0 + d) * (1.0 + d);
}
}  // namespace

double delta0_residual(int n, double eps, double beta, double delta) {
    return g_of(std::pow(2.0, n), eps, beta, delta);
}

double delta0_solve_c(double c, double eps, double beta) {
    if (eps <= 0.0 || eps >= 1.0) throw ConfigError("eps must lie in (0,1)");
    if (beta <= 0.0 || beta >= 1.0) throw ConfigError("beta must lie in (0,1)");
    // g is strictly increasing: g'(d) = c - (1-eps) beta^{1+d}((1+d)log beta + 1)
    // and (1-eps) beta^{1+d} ((1+d)log beta + 1) <= beta < 1 <= c
    double lo = 0.0, hi = 1.0;
    while (g_of(c, eps, beta, hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (std::abs(g_of(c, eps, beta, mid)) < 1e-15) return mid;
        if (g_of(c, eps, beta, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-17 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double delta0_solve(int n, double eps, double beta) {
    return delta0_solve_c(std::pow(2.0, n), eps, beta);
}

double p0_estimate(int n, double C, double K) {
    if (C < 0.0 || K < 0.0) throw ConfigError("C and K must be nonnegative");
    return std::pow(2.0, n + 1) * std::exp(4.0 * C * (1.0 + K));
}

double rh_compose(double p1, double p2) {
    if (p1 <= 1.0 || p2 <= 1.0) throw ConfigError("composition requires exponents > 1");
    return p1 * p2 / (p1 + p2 - 1.0);
}

double iterate_compose(double p, int m) {
    double r = p;
    for (int i = 1; i < m; ++i) r = rh_compose(r, p);
    return r;
}

CzCertificate cz_reverse_holder(const KernelDensity& K, const DyadicTree& tree, double beta,
                                double alpha) {
    if (beta <= 0.0 || beta >= 1.0 || alpha <= 0.0 || alpha > 1.0)
        throw ConfigError("cz certificate needs beta in (0,1), alpha in (0,1]");
    const Grid& g = K.grid;
    const DyadicCube& root = tree.cube(tree.root());
    double m0 = root.omega / root.sigma;
    CzCertificate cert;
    cert.all_ok = true;
    if (m0 <= 0.0) {
        cert.all_ok = false;
        return cert;
    }
    double sc = g.sigma_cell();

    for (int j = 0;; ++j) {
        double lambda = std::ldexp(m0, j);  // 2^j m0
        // maximal dyadic cubes with average > lambda
        std::vector<long> stack = {tree.root()};
        std::vector<long> selected;
        if (root.omega / root.sigma > lambda) {
            // root already above the level; certificate starts below the root
            // average, so treat the root as the single cube
            selected.push_back(tree.root());
            stack.clear();
        }
        while (!stack.empty()) {
            long id = stack.back();
            stack.pop_back();
            const DyadicCube& c = tree.cube(id);
            for (long kid : c.children) {
                const DyadicCube& ck = tree.cube(kid);
                if (ck.omega / ck.sigma > lambda)
                    selected.push_back(kid);
                else
                    stack.push_back(kid);
            }
        }
        CzLevel lev;
        lev.lambda = lambda;
        lev.cubes = static_cast<int>(selected.size());
        if (selected.empty()) {
            if (j > 60) break;
            // no cube exceeds the level anywhere: done
            break;
        }
        // chain quantities
        double lhs = 0.0, level_set_beta = 0.0;
        for (const BoundaryCell& bc : tree.cells_of(tree.root())) {
            double k = K.K.at(bc.j0, bc.j1, bc.k);
            if (k > lambda) lhs += k * sc;
            if (k > beta * lambda) level_set_beta += sc;
        }
        lev.chain_lhs = lhs;
        double cube_mass = 0.0, sig_sum = 0.0, chat = 0.0;
        bool alpha_ok = true;
        for (long id : selected) {
            const DyadicCube& c = tree.cube(id);
            cube_mass += c.omega;
            sig_sum += c.sigma;
            chat = std::max(chat, (c.omega / c.sigma) / lambda);
            // per-cube level-set fraction: sigma({K > beta <K>_Q} cap Q) >= alpha sigma(Q)
            double frac = 0.0;
            for (const BoundaryCell& bc : tree.cells_of(id))
                if (K.K.at(bc.j0, bc.j1, bc.k) > beta * (c.omega / c.sigma)) frac += sc;
            if (frac < alpha * c.sigma * (1.0 - 1e-12)) alpha_ok = false;
        }
        lev.cube_mass = cube_mass;
        lev.c_hat = chat;
        lev.alpha_bound = chat * lambda / alpha * level_set_beta;
        lev.chain_ok = lhs <= cube_mass * (1.0 + 1e-12) &&
                       cube_mass <= chat * lambda * sig_sum * (1.0 + 1e-12) &&
                       cube_mass <= lev.alpha_bound * (1.0 + 1e-12);
        lev.alpha_ok = alpha_ok;
        cert.c_hat = std::max(cert.c_hat, chat);
        cert.all_ok = cert.all_ok && lev.chain_ok && lev.alpha_ok;
        cert.levels.push_back(lev);
        if (j > 60) break;
    }
    double eps = 1.0 - alpha;
    cert.admissible_delta = delta0_solve_c(std::max(cert.c_hat, 1.0 + 1e-12), eps, beta);
    cert.predicted_delta = delta0_solve(g.n, eps, beta);
    return cert;
}

}  // namespace pmlab
