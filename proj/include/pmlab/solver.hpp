#ifndef PMLAB_SOLVER_HPP
#define PMLAB_SOLVER_HPP

#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/common.hpp"
#include "pmlab/geometry.hpp"
#include "pmlab/grid.hpp"

namespace pmlab {

// Boundary piece identifiers for data couplings.
enum class Piece : int { Bottom = 0, Top = 1, SideLo0 = 2, SideHi0 = 3, SideLo1 = 4, SideHi1 = 5 };

// Dirichlet data providers.  k is the time level; side providers receive the
// lateral axis, the height index and the other lateral index.
struct ProblemData {
    std::function<double(const Grid&, int j0, int j1, int k)> bottom;
    std::function<double(const Grid&, int j0, int j1, int k)> top;
    std::function<double(const Grid&, int axis, int side, int i0, int jother, int k)> side;
    std::function<double(const Grid&, int i0, int j0, int j1)> initial;

    static ProblemData zero();
    // bottom data f, zero elsewhere
    static ProblemData lateral_only(std::function<double(const Grid&, int j0, int j1, int k)> f);
};

struct AssembleInfo {
    double min_reduced_diag = 0.0;   // min over cells/axes of a_ii - sum |a_ij|
    double max_offdiag = 0.0;        // max positive off-diagonal of M (0 when monotone)
    double min_row_sum = 0.0;        // min row sum of M over interior rows
    bool mmatrix_ok = true;
    bool full_upwind = true;         // drift is always fully upwinded
};

// Backward-Euler finite-volume operator: harmonic-mean face diffusivities on
// the reduced diagonal part, diagonal-direction two-point fluxes for the
// mixed entries, fully upwinded drift.  The decomposition
//   A = sum_i (a_ii - sum_j |a_ij|) e_i e_i^T + sum_{i<j} |a_ij| w w^T,
//   w = e_i + sign(a_ij) e_j,
// keeps the step matrix an M-matrix whenever the reduced diagonals are
// nonnegative, which makes the discrete maximum principle and the
// nonnegativity of adjoint weights exact statements rather than heuristics.
class DiscreteOperator {
public:
    DiscreteOperator(const Grid& grid, CoefficientField coeffs);

    struct Coupling {
        long cell;
        Piece piece;
        int a, b;  // bottom/top: (j0,j1); sides: (i0, jother)
        double w;
    };
    struct StepSystem {
        Eigen::SparseMatrix<double> M;  // I - ht L
        std::vector<Coupling> couplings;
    };

    const Grid& grid() const { return grid_; }
    const CoefficientField& coeffs() const { return coeffs_; }
    const AssembleInfo& info() const { return info_; }

    // system for time level k (cached when coefficients are static)
    const StepSystem& step(int k) const;
    // stationary system -L v = couplings . data, used for the time-zero
    // elliptic extension of experiment data
    StepSystem stationary(int k) const;

private:
    void assemble(int k, StepSystem& out, bool stationary) const;

    Grid grid_;
    CoefficientField coeffs_;
    mutable AssembleInfo info_;
    mutable StepSystem cache_;
    mutable int cached_k_ = -1;
};

struct SideField {
    // [axis][side] -> values indexed (i0, jother, k-1)
    std::array<std::array<std::vector<double>, 2>, 2> v;
};

struct DiscreteSolution {
    Grid grid;
    SpaceTimeField v;
    BoundaryField bottom, top;  // sampled data actually applied
    SideField sides;
    std::vector<double> residuals;  // relative residual per step
    double data_min = 0.0, data_max = 0.0;

    double side_at(int axis, int side, int i0, int jother, int k) const {
        const auto& a = sides.v[axis][side];
        long nother = axis == 0 ? grid.nlat[1] : grid.nlat[0];
        (void)nother;
        long stride = static_cast<long>(grid.nx0);
        long per_step = stride * (axis == 0 ? grid.nlat[1] : grid.nlat[0]);
        return a[static_cast<size_t>(k - 1) * per_step + jother * stride + i0];
    }
};

struct SolverParams {
    double tol = 1e-11;      // relative residual per linear solve
    int max_iter = 2000;
    bool initial_from_elliptic_extension = false;  // else ProblemData.initial
};

// March the backward-Euler system; per-step iterative solves (BiCGSTAB with
// diagonal preconditioning) to the configured relative residual.  Aborts
// with diagnostics on non-convergence.
DiscreteSolution solve(const DiscreteOperator& op, const ProblemData& data,
                       const SolverParams& params = {});

// Lateral boundary weights of the discrete parabolic measure for the given
// pole: one backward-in-time transpose march.  For every data vector f,
// sum(w . f) reproduces the forward solution at the pole to solver tolerance.
struct MeasureWeights {
    Grid grid;
    BoundaryField lateral;   // bottom-face weights per (j0, j1, k)
    double top_mass = 0.0, side_mass = 0.0, initial_mass = 0.0;
    long pole_cell = 0;
    int pole_step = 0;

    double lateral_mass() const {
        double s = 0.0;
        for (double x : lateral.v) s += x;
        return s;
    }
    double total_mass() const { return lateral_mass() + top_mass + side_mass + initial_mass; }
};

MeasureWeights adjoint_measure(const DiscreteOperator& op, const ParabolicPoint& pole,
                               const SolverParams& params = {});
MeasureWeights adjoint_measure_cell(const DiscreteOperator& op, long pole_cell, int pole_step,
                                    const SolverParams& params = {});

// Spatial gradient by face differences averaged to cells, first order.
// Boundary faces difference against the sampled Dirichlet data at half
// spacing.  Component axis < n; time levels 1..nt (level 0 left zero).
struct GradientField {
    Grid grid;
    std::array<SpaceTimeField, 3> g;
    double mag2(long c, int k) const {
        double s = 0.0;
        for (int a = 0; a < grid.n; ++a) s += sqr(g[a].at(c, k));
        return s;
    }
};
GradientField spatial_gradient(const DiscreteSolution& sol);

// Time-zero elliptic extension of the bottom data (zero sides/top): the
// stationary solve used to initialize experiment runs.
std::vector<double> elliptic_extension(const DiscreteOperator& op, const ProblemData& data,
                                       const SolverParams& params = {});

}  // namespace pmlab

#endif
