#ifndef PMLAB_COEFFICIENTS_HPP
#define PMLAB_COEFFICIENTS_HPP

#include <functional>
#include <memory>

#include "pmlab/common.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/pullback.hpp"

namespace pmlab {

// Per-cell coefficient provider for the operator v_t = div(A grad v) + B.grad v.
// Coefficients are piecewise constant per cell; k is the time level.
struct CoefficientField {
    int n = 1;
    bool time_dependent = false;
    std::function<SymMat(const Grid&, long cell, int k)> A;
    std::function<Vec3(const Grid&, long cell, int k)> B;  // empty => zero drift
};

CoefficientField coeff_identity(int n);
CoefficientField coeff_diagonal(int n, std::array<double, 3> d);

// Random uniformly elliptic symmetric field with eigenvalues in [lam, Lam],
// static in time, one sample per cell.  Off-diagonal entries are damped to
// row diagonal dominance when necessary so the finite-volume decomposition
// stays monotone; damping keeps the spectrum inside [lam, Lam].
CoefficientField coeff_random_elliptic(int n, const Grid& grid, double lam, double Lam,
                                       std::uint64_t seed);

// a(x0) = 2 + sin(log(1/x0)) times the identity: the classical witness whose
// oscillation density fails the Carleson condition at vanishing scales.
CoefficientField coeff_oscillatory_witness(int n);

// Identity plus a smooth bump of given amplitude supported in a parabolic
// ball around (x0_c, x_c, t_c) with radius w (support kept at x0 >= x0_c - w).
CoefficientField coeff_bump(int n, double amp, double x0_c, std::array<double, 2> x_c,
                            double t_c, double w);

// Wraps transformed coefficients produced by the pullback.
CoefficientField coeff_from_transformed(std::shared_ptr<const TransformedCoefficients> tc);

}  // namespace pmlab

#endif
