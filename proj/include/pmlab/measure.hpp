#ifndef PMLAB_MEASURE_HPP
#define PMLAB_MEASURE_HPP

#include <vector>

#include "pmlab/geometry.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// Lateral kernel density K = omega / sigma for a fixed pole, together with
// the masses carried by the truncation pieces (reported separately and
// excluded from lateral analytics).
struct KernelDensity {
    Grid grid;
    BoundaryField K;       // per lateral cell
    BoundaryField omega;   // raw weights
    double top_mass = 0.0, side_mass = 0.0, initial_mass = 0.0;
    long pole_cell = 0;
    int pole_step = 0;
};

KernelDensity kernel_density(const MeasureWeights& w);

// omega mass of a set of lateral boundary cells.
double parabolic_measure(const KernelDensity& K, const std::vector<BoundaryCell>& E);
double parabolic_measure(const BoundaryField& weights, const std::vector<BoundaryCell>& E);

// Doubling ratios omega(Delta_{2r})/omega(Delta_r) over a nested family
// r, 2r, 4r, ... around one center.
struct DoublingTable {
    std::vector<double> radii;
    std::vector<double> omega_r;
    std::vector<double> ratios;  // ratios[i] = omega(2 r_i)/omega(r_i)
    double max_ratio = 0.0;
    int excluded = 0;  // balls with omega below tolerance
};
DoublingTable doubling_table(const KernelDensity& K, const BoundaryBall& smallest,
                             int octaves, double mass_tol = 1e-13);

// Knapsack scan of the absolute-continuity characteristic: for each ball and
// delta, the maximal sigma-fraction of a subset with omega-fraction <= delta
// (cells sorted by K ascending, final cell taken fractionally -- the exact
// optimum over Borel subsets at grid scale).
struct AinftyRow {
    double delta;
    double epsilon;       // max over balls
    std::vector<double> per_ball;
};
struct AinftyTable {
    std::vector<AinftyRow> rows;
};
AinftyTable ainfty_scan(const KernelDensity& K, const std::vector<BoundaryBall>& balls,
                        const std::vector<double>& deltas);

// Brute-force subset optimum for small balls (<= ~20 cells): used to verify
// greedy optimality to within one fractional cell.
double ainfty_bruteforce(const KernelDensity& K, const BoundaryBall& ball, double delta);
double ainfty_greedy(const KernelDensity& K, const BoundaryBall& ball, double delta);

// Reverse Holder quotient (avg K^p)^{1/p} / avg K, sup over balls.
double reverse_holder(const KernelDensity& K, double p,
                      const std::vector<BoundaryBall>& balls);
// Largest p <= cap with sup quotient <= bound (bisection, 30 iterations).
double best_p(const KernelDensity& K, const std::vector<BoundaryBall>& balls, double cap,
              double bound);

}  // namespace pmlab

#endif
