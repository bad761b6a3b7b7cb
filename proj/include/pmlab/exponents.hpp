#ifndef PMLAB_EXPONENTS_HPP
#define PMLAB_EXPONENTS_HPP

#include <vector>

#include "pmlab/dyadic.hpp"
#include "pmlab/measure.hpp"

namespace pmlab {

// epsilon(beta) = C (1+K) / (-log beta), beta in (0,1).
double epsilon_of_beta(double C, double K, double beta);

// Unique positive root of 1/delta = 2^n / ((1-eps) beta^{1+delta} (1+delta)),
// bisection on g(d) = d 2^n - (1-eps) beta^{1+d} (1+d) to |g| < 1e-13.
double delta0_solve(int n, double eps, double beta);
double delta0_residual(int n, double eps, double beta, double delta);
// same relation with the dyadic constant supplied (measured instead of 2^n)
double delta0_solve_c(double c, double eps, double beta);

// p0 = 2^{n+1} exp(4 C (1+K)).
double p0_estimate(int n, double C, double K);

// Reverse Holder composition r = p1 p2 / (p1 + p2 - 1), and its m-fold
// iteration starting from p.
double rh_compose(double p1, double p2);
double iterate_compose(double p, int m);

// (beta, eps) -> (beta, alpha) level-set form adapter, alpha = 1 - eps.
inline double alpha_of_epsilon(double eps) { return 1.0 - eps; }

// Discrete stopping-time certificate: at levels lambda = 2^j m_Delta the
// maximal dyadic cubes with average above lambda are collected; the chain
//   int_{K>lambda} K dsigma <= sum_i int_{Q_i} K <= C_hat lambda sum sigma(Q_i)
//                          <= (C_hat lambda / alpha) sigma({K > beta lambda})
// is verified level by level and the measured C_hat (max cube average over
// its level) replaces the a priori dyadic constant in the delta relation.
struct CzLevel {
    double lambda = 0.0;
    int cubes = 0;
    double chain_lhs = 0.0;        // int_{K>lambda} K dsigma
    double cube_mass = 0.0;        // sum_i int_{Q_i} K
    double c_hat = 0.0;            // max cube average / lambda
    double alpha_bound = 0.0;      // (c_hat lambda / alpha) sigma({K > beta lambda})
    bool chain_ok = false;
    bool alpha_ok = false;         // per-cube level-set fraction >= alpha
};
struct CzCertificate {
    std::vector<CzLevel> levels;
    double c_hat = 1.0;            // max over levels (>= 1)
    double admissible_delta = 0.0; // root of the relation with measured c_hat
    double predicted_delta = 0.0;  // root with the a priori 2^n
    bool all_ok = false;
};
CzCertificate cz_reverse_holder(const KernelDensity& K, const DyadicTree& tree, double beta,
                                double alpha);

}  // namespace pmlab

#endif
