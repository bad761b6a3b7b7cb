#ifndef PMLAB_ORACLE_HPP
#define PMLAB_ORACLE_HPP

#include <functional>
#include <vector>

#include "pmlab/common.hpp"
#include "pmlab/grid.hpp"

namespace pmlab {
namespace oracle {

// Lateral Dirichlet kernel of the heat equation u_t = Delta u on the
// half-space {x0 > 0}:
//   k(x0, dy, tau) = [x0/(2 sqrt(pi)) tau^{-3/2} e^{-x0^2/(4 tau)}]
//                    * (4 pi tau)^{-(n-1)/2} e^{-|dy|^2/(4 tau)},  tau > 0.
// Semi-analytic reference for solver and measure validation; all tolerances
// here are kept well below the solver tolerances they judge.
double caloric_kernel(int n, double x0, const double* dy, double tau);

// Total boundary mass of the kernel at height x0 (analytically 1).  Computed
// by adaptive quadrature after the substitution u = x0^2/(4 tau); the lateral
// Gaussian factor is integrated separately in scaled variables.
double kernel_mass(double x0, int n, double tol = 1e-12);

// Boundary data for half-space evaluations: Gaussian pulse in time and, for
// n >= 2, a separable Gaussian in each lateral coordinate.
struct GaussianPulse {
    double amp = 1.0;
    double t_center = 0.0, t_width = 1.0;       // exp(-(t-c)^2 / (2 w^2))
    std::array<double, 2> x_center{0.0, 0.0};   // lateral centers
    std::array<double, 2> x_width{1.0, 1.0};
    double time_factor(double s) const {
        return amp * std::exp(-0.5 * sqr((s - t_center) / t_width));
    }
};

// u(x0, x, t) for zero initial data and lateral data f on {x0 = 0}, by
// quadrature of the kernel against f.  The Gaussian overload resolves the
// lateral convolution in closed form and quadratures only in time (fast path
// used for whole-field evaluation); the generic overload quadratures in all
// variables and serves as its cross-check.
double halfspace_solution_gaussian(int n, const GaussianPulse& f, double x0,
                                   const double* x, double t, double tol = 1e-11);
double halfspace_solution_generic(int n, const std::function<double(const double*, double)>& f,
                                  double lat_lo, double lat_hi,  // lateral support bounds
                                  double x0, const double* x, double t,
                                  double tol = 1e-9);

// n=1 sampled-data evaluation: f given on time samples (piecewise linear).
double halfspace_solution_sampled(const std::vector<double>& f_times,
                                  const std::vector<double>& f_values, double x0,
                                  double t, double tol = 1e-11);

// Lebesgue measure of the parabolic cone slice {(x,t) in R^{n-1} x R :
// |x| + |t|^{1/2} < a}; the constant in the square-function identity
//   int_{dU} S_a(u)^2 dsigma = c(n,a) int_U y0 |grad u|^2.
double cone_slice_constant(int n, double a);
// Monte Carlo cross-check of the same constant.
double cone_slice_constant_mc(int n, double a, long samples, std::uint64_t seed);

// Kernel weight of one lateral boundary cell [y-hy/2, y+hy/2]^{n-1} x
// [s0, s1] seen from the pole (x0, x, t): integral of the kernel over the
// cell, by tensorized Gauss panels (n<=2 lateral).
double kernel_cell_weight(int n, double x0, const double* x, double t,
                          const double* y, double hy, double s0, double s1);

}  // namespace oracle
}  // namespace pmlab

#endif
