#ifndef PMLAB_GEOMETRY_HPP
#define PMLAB_GEOMETRY_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pmlab/common.hpp"
#include "pmlab/grid.hpp"

namespace pmlab {

// Point in the (x0, x, t) coordinate system of a graph chart.
struct ParabolicPoint {
    double x0 = 0.0;
    std::array<double, 2> x{0.0, 0.0};  // lateral coordinates (n-1 used)
    double t = 0.0;
};

// Parabolic distance d[(X,t),(Y,s)] = (|X-Y|^2 + |t-s|)^{1/2}.
double par_dist(int n, const ParabolicPoint& p, const ParabolicPoint& q);

// Boundary ball Delta_r: lateral center + time center + parabolic radius.
struct BoundaryBall {
    std::array<double, 2> y{0.0, 0.0};
    double s = 0.0;
    double r = 0.0;
};

// Parabolic cube Q_r: |x_i - y_i| < r, |t - s| < r^2.
struct ParabolicCube {
    std::array<double, 2> y{0.0, 0.0};
    double s = 0.0;
    double r = 0.0;
};

// Uniform sampling lattice for the graph function psi(x, t):
// nodes x_j = lo + j*dx (j = 0..nx-1 per lateral axis), t_m = t_lo + m*dt.
struct ChartGrid {
    int n = 1;
    std::array<int, 2> nx{1, 1};
    std::array<double, 2> lo{0.0, 0.0};
    double dx = 0.0;
    int nt = 0;
    double t_lo = 0.0;
    double dt = 0.0;

    long nodes() const { return static_cast<long>(nx[0]) * nx[1] * nt; }
    long node(int j0, int j1, int m) const {
        return j0 + static_cast<long>(nx[0]) * (j1 + static_cast<long>(nx[1]) * m);
    }
};

// Sampled time-varying graph {x0 = psi(x,t)} truncated to the slab
// [psi, psi+H] x lateral box x [0,T], normalized so psi(0,0) = 0.
class GraphDomain {
public:
    GraphDomain() = default;
    GraphDomain(ChartGrid chart, std::vector<double> samples, double H);

    const ChartGrid& chart() const { return chart_; }
    double H() const { return H_; }
    int n() const { return chart_.n; }

    // bilinear/trilinear interpolation with nearest-value extension
    double psi(const double* x, double t) const;
    // lateral gradient of the interpolant (centered difference at scale dx/2)
    void grad_psi(const double* x, double t, double* g) const;
    // time derivative of the interpolant (centered difference at scale dt/2)
    double dpsi_dt(const double* x, double t) const;

    double sample(int j0, int j1, int m) const { return samples_[chart_.node(j0, j1, m)]; }
    const std::vector<double>& samples() const { return samples_; }

    // measured character: recomputes and caches (ell, halfder_bmo)
    double ell_spatial() const { return ell_; }
    double halfder_bmo() const { return bmo_; }
    bool character_unbounded() const { return unbounded_flag_; }
    void set_character(double ell, double bmo, bool unbounded) {
        ell_ = ell; bmo_ = bmo; unbounded_flag_ = unbounded;
    }

private:
    ChartGrid chart_;
    std::vector<double> samples_;
    double H_ = 1.0;
    double ell_ = 0.0, bmo_ = 0.0;
    bool unbounded_flag_ = false;
};

// Builders for the standard graph kinds.
GraphDomain make_graph_zero(int n, ChartGrid chart, double H);
GraphDomain make_graph_linear(int n, ChartGrid chart, double H,
                              std::array<double, 2> alpha);
GraphDomain make_graph_sine(int n, ChartGrid chart, double H, double amp, double kx,
                            double kt);
GraphDomain make_graph_samples(int n, ChartGrid chart, double H,
                               std::vector<double> samples);

// Half time-derivative at a sample node, principal-value quadrature of
//   c_n int_I (psi(x,s) - psi(x,t)) |s-t|^{-3/2} ds
// over the sampled interval.  Signals when the time grid is too coarse for
// the singular quadrature (fewer than 8 samples in I).
double half_time_derivative(const GraphDomain& dom, int j0, int j1, int m,
                            double c_n = 1.0);

// Measured character of the sampled graph: the discrete Lip(1,1/2) constant
// (exhaustive pair scan) and the parabolic BMO norm of D^t_{1/2} psi over the
// sampled cube family.  Stores the result in the domain record.
struct Character {
    double ell_spatial = 0.0;
    double halfder_bmo = 0.0;
    bool unbounded = false;
};
Character character(GraphDomain& dom, double c_n = 1.0);

// Boundary measure sigma of a set of lateral-boundary cells (j0, j1, k) of
// the solver grid: sum of sqrt(1+|grad_x psi|^2) * (lateral cell area) *
// time step.  For n=1 the spatial factor is 1.
struct BoundaryCell {
    int j0 = 0, j1 = 0, k = 1;
};
double sigma_measure(const GraphDomain& dom, const Grid& grid,
                     const std::vector<BoundaryCell>& region);

// Corkscrew point of a boundary ball in pulled-back coordinates:
// (c_v r, y, s + 2 r^2).  Signals if the point exits the truncated slab.
ParabolicPoint corkscrew(const Grid& grid, const BoundaryBall& ball, double c_v = 0.5);

// Interior grid cells (cell index + time step) whose centers lie in
// Omega cap B_r(center), pulled-back coordinates (delta = x0).
struct CellRef {
    long cell = 0;
    int k = 1;
};
std::vector<CellRef> carleson_region(const Grid& grid, const BoundaryBall& ball);

// Lateral boundary cells with centers inside the ball.
std::vector<BoundaryCell> boundary_ball_cells(const Grid& grid, const BoundaryBall& ball);
// ... and inside the parabolic cube.
std::vector<BoundaryCell> boundary_cube_cells(const Grid& grid, const ParabolicCube& cube);

}  // namespace pmlab

#endif
