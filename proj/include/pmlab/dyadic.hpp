#ifndef PMLAB_DYADIC_HPP
#define PMLAB_DYADIC_HPP

#include <vector>

#include "pmlab/functionals.hpp"
#include "pmlab/geometry.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/measure.hpp"

namespace pmlab {

// Parabolic dyadic cube over the lateral boundary grid: a cell-aligned box
// of lateral cells and time steps.  Children halve each lateral axis and
// quarter the time axis, so nesting and mass additivity are exact.
struct DyadicCube {
    int depth = 0;
    std::array<int, 2> j_lo{0, 0}, j_cnt{1, 1};
    int k_lo = 1, k_cnt = 1;  // time step range [k_lo, k_lo + k_cnt)
    long parent = -1;
    std::vector<long> children;
    double omega = 0.0, sigma = 0.0;
    // geometric center and scale (r = lateral half-width; time half = r^2 for
    // parabolic-consistent roots)
    std::array<double, 2> center{0.0, 0.0};
    double center_t = 0.0;
    double r = 0.0;

    bool contains(const DyadicCube& other) const {
        return other.j_lo[0] >= j_lo[0] && other.j_lo[0] + other.j_cnt[0] <= j_lo[0] + j_cnt[0] &&
               other.j_lo[1] >= j_lo[1] && other.j_lo[1] + other.j_cnt[1] <= j_lo[1] + j_cnt[1] &&
               other.k_lo >= k_lo && other.k_lo + other.k_cnt <= k_lo + k_cnt;
    }
    bool contains_cell(int j0, int j1, int k) const {
        return j0 >= j_lo[0] && j0 < j_lo[0] + j_cnt[0] && j1 >= j_lo[1] &&
               j1 < j_lo[1] + j_cnt[1] && k >= k_lo && k < k_lo + k_cnt;
    }
};

class DyadicTree {
public:
    // Builds the tree over the root region; omega masses cached per cube.
    // Splitting continues while lateral counts divide by 2 and the time count
    // by 4 (engineered roots descend to single-cell atoms).
    DyadicTree(const Grid& grid, const BoundaryField& omega, std::array<int, 2> j_lo,
               std::array<int, 2> j_cnt, int k_lo, int k_cnt, int max_depth = 32);

    const Grid& grid() const { return grid_; }
    const DyadicCube& cube(long id) const { return cubes_[id]; }
    long root() const { return 0; }
    long size() const { return static_cast<long>(cubes_.size()); }
    int max_depth() const { return max_depth_; }

    // atoms = deepest cubes (leaves)
    const std::vector<long>& atoms() const { return atoms_; }
    // leaf atom containing a boundary cell, -1 if outside the root
    long atom_of(int j0, int j1, int k) const;

    // mass of a sub-cube set intersected with an indicator over atoms
    double masked_omega(long cube_id, const std::vector<char>& atom_mask) const;

    std::vector<BoundaryCell> cells_of(long cube_id) const;

private:
    long build(int depth, std::array<int, 2> j_lo, std::array<int, 2> j_cnt, int k_lo,
               int k_cnt, long parent, int max_depth);

    Grid grid_;
    const BoundaryField* omega_ = nullptr;  // only during build
    std::vector<DyadicCube> cubes_;
    std::vector<long> atoms_;
    std::vector<long> atom_index_;  // per boundary cell of the root region
    std::array<int, 2> root_j_lo_{0, 0}, root_j_cnt_{1, 1};
    int root_k_lo_ = 1, root_k_cnt_ = 1;
    int max_depth_ = 0;
};

// Nested stopping-time cover: levels[0] = {root} down to levels[k], each
// level a disjoint set of cubes, every cube S of level l-1 satisfying
//   omega(O_l cap S) <= eps0 * omega(S)          (verified exactly)
// with E contained in every level.
struct GoodCover {
    double eps0 = 0.0;
    double delta0 = 0.0;  // omega(E)/omega(root)
    std::vector<std::vector<long>> levels;
    int length() const { return static_cast<int>(levels.size()) - 1; }
};

// E is a set of atoms (leaf cubes).  Signals when delta0 >= eps0 or when the
// post-hoc verification fails.
GoodCover good_cover(const DyadicTree& tree, const std::vector<long>& E_atoms, double eps0);

// Exact verification of the cover property and the iterated form
// omega(S_j^m cap O_l) <= eps0^{l-m} omega(S_j^m).
bool verify_good_cover(const DyadicTree& tree, const GoodCover& cover,
                       const std::vector<long>& E_atoms, std::string* why = nullptr);

// Alternating test data built on the cover: for even m, f_m is the indicator
// of the time-shifted sub-cubes Delta'_i (scale r' = r/sqrt(2), centered at
// (y, s - r'^2)) over the cubes of level m; f_{m+1} = -f_m restricted to
// O_{m+1}.  The sum is a Borel function with values in [0,1].
struct LevelBox {
    long cube = -1;
    double r = 0, rp = 0, rpp = 0;      // r, r' = r/sqrt2, r'' = r'/4
    std::array<double, 2> y{0.0, 0.0};  // cube center
    double s = 0.0;
    bool resolved = true;  // H and A boxes at least 4 cells across (time), 1 in height
};
struct OscillationData {
    BoundaryField f;
    std::vector<std::vector<LevelBox>> even_levels;  // index m/2 -> boxes of level m
    double rho = 0.1;
    int k_skip = 2;
};
OscillationData oscillation_test_data(const DyadicTree& tree, const GoodCover& cover,
                                      double rho, int k_skip);

// Square-function lower-bound experiment: solve with the alternating data,
// measure per-box oscillation and the per-E-cell tally
//   sum_j int_{A_{m_j}} y0^{-n} |grad u|^2.
struct BoxStats {
    int level = 0;
    long cube = -1;
    bool resolved = false;
    double u_top_min = 0.0;   // min over H of u(r', .)
    double u_bot_max = 0.0;   // max over H of u(rho r', .)
    double margin = 0.0;      // min over H of the pointwise difference
    double box_integral = 0.0;
};
struct LowerBoundReport {
    std::vector<BoxStats> boxes;
    std::vector<double> tally;  // per E-cell
    std::vector<int> selected;  // per E-cell: number of selected levels J
    double c_meas = 0.0;        // 10th percentile of tally/J over cells with J > 0
    double pass_fraction = 0.0; // fraction of E-cells with tally >= c_meas * J
    double margin_positive_fraction = 0.0;  // over resolved boxes
    double aperture_needed = 0.0;
    int cover_length = 0;
};
LowerBoundReport lower_bound_experiment(const DyadicTree& tree, const GoodCover& cover,
                                        const OscillationData& data,
                                        const DiscreteSolution& sol,
                                        const GradientField& grad,
                                        const std::vector<long>& E_atoms);

}  // namespace pmlab

#endif
