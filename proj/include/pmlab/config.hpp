#ifndef PMLAB_CONFIG_HPP
#define PMLAB_CONFIG_HPP

#include <json.hpp>
#include <string>

#include "pmlab/coefficients.hpp"
#include "pmlab/geometry.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

using json = nlohmann::json;

// Experiment configuration ingested from JSON:
// {
//   "domain": {"n":1, "psi":{"kind":"zero"|"linear"|"sine"|"samples", ...},
//              "H":1.0, "lateral":[lo,hi], "time":[0,T], "hx":..., "nx0":...,
//              "ht":...},
//   "coefficients": {"kind":"identity"|"diagonal"|"random-elliptic"|
//                    "oscillatory-witness"|"bump", ...},
//   "solver": {"tol":1e-11, "max_iter":2000, "burn_in_frac":0.125},
//   "functionals": {"aperture":2.0},
//   "pullback": {"gamma":0.1, "profile_points":17},
//   "seed": 1
// }
struct ExperimentConfig {
    json raw;
    int n = 1;
    Grid grid;
    GraphDomain domain;
    CoefficientField coefficients;
    SolverParams solver;
    double burn_in_frac = 0.125;
    double aperture = 2.0;
    double gamma = 0.1;
    int profile_points = 17;
    std::uint64_t seed = 1;

    double burn_in_time() const { return burn_in_frac * grid.time_end(); }
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

// Atomic JSON write: temp file in the same directory, then rename.
void write_report(const json& report, const std::string& path);
// CSV export of a lateral boundary field (rows = time steps, cols = space).
void write_boundary_csv(const BoundaryField& f, const std::string& path);
// CSV export of one time slice of a space-time field (rows = x0 index).
void write_slice_csv(const Grid& g, const SpaceTimeField& f, int step,
                     const std::string& path);

// Sampled psi from CSV (row = time index, column = space index).
std::vector<double> read_csv_grid(const std::string& path, int& rows, int& cols);

}  // namespace pmlab

#endif
