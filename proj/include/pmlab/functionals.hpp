#ifndef PMLAB_FUNCTIONALS_HPP
#define PMLAB_FUNCTIONALS_HPP

#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/geometry.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// Parabolic non-tangential cone over a boundary vertex (x,t):
//   Gamma_a^r(x,t) = { (y0,y,s) : |y-x| + |s-t|^{1/2} < a y0, 0 < y0 < r }.
// Membership is decided by cell center.  At heights where the cone is
// thinner than one cell the vertex's own column is kept so truncated cones
// are never spuriously empty.
struct Cone {
    double aperture = 2.0;
    double height = 0.0;  // truncation r, 0 => full slab
};

// Non-tangential maximal function N_a^r(v) per lateral boundary cell.
// Signals a degenerate aperture when no height level fits below r.
BoundaryField ntmax(const DiscreteSolution& sol, double aperture, double r);

// Square function S_a^r by a height-major sweep with per-height prefix sums:
//   S(x,t) = ( sum_{cone cells} y0^{-n} |grad v|^2 cellvol )^{1/2}.
BoundaryField square_function(const DiscreteSolution& sol, const GradientField& grad,
                              double aperture, double r);

// Carleson energy of a solution over one boundary ball:
//   sigma(Delta)^{-1} sum_{T(Delta)} |grad v|^2 delta(cell) cellvol.
double carleson_energy(const DiscreteSolution& sol, const GradientField& grad,
                       const BoundaryBall& ball);

// Nonnegative cell density with a provenance tag.
enum class DensityKind { SolutionEnergy, Oscillation, Gradient, Perturbation };
struct CarlesonDensity {
    Grid grid;
    DensityKind kind = DensityKind::Oscillation;
    std::vector<double> mu;  // per cell, per step 1..nt: (k-1)*ncells + cell
    double at(long cell, int k) const { return mu[static_cast<size_t>(k - 1) * gridcells + cell]; }
    long gridcells = 0;
};

// Carleson norm over a family of boundary cubes:
//   max over cubes of mu(T(Q_r)) / sigma(Q_r),  T(Q_r) = (0,r) x Q_r.
struct CubeFamily {
    std::vector<ParabolicCube> cubes;
};
CubeFamily dyadic_cube_family(const Grid& grid, double r_max, double burn_in_time);
double carleson_norm(const CarlesonDensity& mu, const Grid& grid, const CubeFamily& family);

// Coefficient-regularity densities.  osc/sup are taken over grid cells
// intersecting the parabolic ball B_{delta/2}(X) and over matrix entries
// (max-entry reduction).
CarlesonDensity oscillation_density(const CoefficientField& A, const Grid& grid);
CarlesonDensity gradient_density(const CoefficientField& A, const Grid& grid);
CarlesonDensity perturbation_density(const CoefficientField& A0, const CoefficientField& A2,
                                     const Grid& grid);
// Cone-integrated perturbation condition: per boundary cell the truncated cone
// integral of delta^{-2-n} sup_B |A0-A2|^2, then the sup of ball averages.
double perturbation_carleson(const CoefficientField& A0, const CoefficientField& A2,
                             const Grid& grid, double aperture, double r,
                             const std::vector<BoundaryBall>& balls);

// Parabolic BMO norm of a lateral boundary field: sup over a sliding family
// of parabolic cubes (all positions, dyadic sizes) of the mean oscillation.
double bmo_norm(const BoundaryField& f, const Grid& grid);

// sigma mass of a ball on the flat chart (sum of boundary cell measures).
double sigma_ball(const Grid& grid, const BoundaryBall& ball);

}  // namespace pmlab

#endif
