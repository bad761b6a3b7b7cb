#ifndef PMLAB_PULLBACK_HPP
#define PMLAB_PULLBACK_HPP

#include <functional>
#include <vector>

#include "pmlab/geometry.hpp"
#include "pmlab/grid.hpp"

namespace pmlab {

// Nonnegative C~inf bump profile on the unit parabolic cube Q_1(0,0),
// product of one-dimensional exp(-1/(1-s^2)) factors, sampled at symmetric
// midpoint nodes and renormalized to unit discrete mass.  Even in every
// variable, so linear graphs are reproduced exactly.
class Mollifier {
public:
    explicit Mollifier(int n, int pts_per_axis = 17);
    int n() const { return n_; }
    // quadrature nodes in (-1,1) and a weight per lateral-node x time-node
    // combination; sum of weights is exactly 1 after normalization
    const std::vector<double>& nodes() const { return nodes_; }
    double weight(int ix0, int ix1, int it) const {
        int m = static_cast<int>(nodes_.size());
        int idx = it;
        if (n_ >= 2) idx = idx * m + ix0;
        if (n_ >= 3) idx = idx * m + ix1;
        return w_[idx];
    }

private:
    int n_;
    std::vector<double> nodes_;
    std::vector<double> w_;
};

// P_lambda psi (x,t): discrete convolution of the rescaled profile with the
// sampled graph, evaluated as a fixed quadrature over the unit cube
//   sum_q P(xi_q, tau_q) psi(x - lambda xi_q, t - lambda^2 tau_q) w_q.
double mollified_graph(const GraphDomain& dom, const Mollifier& P, double lambda,
                       const double* x, double t);

// Value together with the scale/lateral/time derivatives, differentiated
// through the quadrature (the scale derivative needs no finite-difference
// step in lambda):
//   d/dlambda = sum_q w_q [ -xi_q . grad psi - 2 lambda tau_q psi_t ](shifted).
struct MollifiedDerivs {
    double value = 0.0;
    double dlambda = 0.0;
    std::array<double, 2> dlat{0.0, 0.0};
    double dt = 0.0;
};
MollifiedDerivs mollified_graph_derivs(const GraphDomain& dom, const Mollifier& P,
                                       double lambda, const double* x, double t);

// Adapted-distance map rho(x0,x,t) = (x0 + P_{gamma x0} psi(x,t), x, t)
// sampled on a solver grid, with finite-difference Jacobian entries.
struct AdaptedMap {
    Grid grid;
    double gamma = 0.1;
    // phi = P_{gamma x0} psi at every cell center and time level 0..nt
    SpaceTimeField phi;
    SpaceTimeField dphi_dx0;           // d phi / d x0
    std::array<SpaceTimeField, 2> dphi_dlat;  // lateral derivatives (n-1 used)
    SpaceTimeField dphi_dt;
    double min_dx0_rho0 = 1.0;   // min over cells of d rho_0 / d x0 = 1 + phi_x0
    double trace_error = 0.0;    // max |P_{gamma h/2} psi - psi| at the first height

    double rho0(long c, int k) const {
        int i0, j0, j1;
        grid.cell_coords(c, i0, j0, j1);
        return grid.x0(i0) + phi.at(c, k);
    }
};

// Builds the map on the given grid.  Signals non-injectivity when
// min(1 + phi_x0) <= 0 (gamma too large for the measured ell).
AdaptedMap build_map(const GraphDomain& dom, const Mollifier& P, const Grid& grid,
                     double gamma);

// Coefficients of the transformed equation
//   v_t = div(A^rho grad v) + B^rho . grad v  on the slab,
// obtained from A on the original domain by the change of variables
//   A^rho = J^{-1} A J^{-T},
//   B^rho_j = sum_i A^rho_{ij} d_i(det J)/det J + delta_{j0} phi_t / det J,
// where J is the spatial Jacobian of the map.  Correctness is defined
// operationally by the weak-form residual tests.
struct TransformedCoefficients {
    Grid grid;
    int n = 1;
    // per cell, per time level: symmetric entries (row-major upper triangle)
    // and drift vector
    std::vector<double> A;  // (nt+1) * ncells * 6
    std::vector<double> B;  // (nt+1) * ncells * 3
    double lambda_rho = 0.0, Lambda_rho = 0.0;  // measured ellipticity bounds

    SymMat A_at(long c, int k) const;
    Vec3 B_at(long c, int k) const;
};

using MatrixField = std::function<SymMat(const ParabolicPoint&, double t)>;

TransformedCoefficients transform_coefficients(const MatrixField& A_on_domain,
                                               const GraphDomain& dom,
                                               const AdaptedMap& map);

}  // namespace pmlab

#endif
