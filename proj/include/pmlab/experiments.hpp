#ifndef PMLAB_EXPERIMENTS_HPP
#define PMLAB_EXPERIMENTS_HPP

#include <json.hpp>

#include "pmlab/config.hpp"

namespace pmlab {
namespace experiments {

using json = nlohmann::json;

// Every driver returns a report with a top-level "pass" flag and the
// measured quantities (each numeric result carries its grid resolution and
// the seed that produced it).

json oracle_validate();

// adjoint lateral weights vs the analytic kernel on the flat heat
// configuration (n=1, 256 x 512), relative L1 away from the pole
json kernel_oracle();

// unit mass and positivity of adjoint weights across random elliptic fields
json unit_mass_positivity(int fields = 10, std::uint64_t seed = 11);

// discrete maximum and comparison principles over random pairs
json max_comparison(int pairs = 100, std::uint64_t seed = 7);

// square-function identity against the analytic cone-slice constant
json square_identity();

// bounded-data Carleson energy stability + BMO log-family stability
json bmo_check(int draws = 50, std::uint64_t seed = 23);

// epsilon(delta) monotonicity and greedy-vs-bruteforce optimality
json ainfty_experiment();

// doubling ratios over octaves, stability under refinement
json doubling_experiment();

// stopping-time cover + alternating-data lower bound, with refinement and
// the cover-length scaling study
json lower_bound_experiment_driver(bool with_refinement = true);

// closed-form exponent calculus properties + stopping-time certificate
json exponent_checks(std::uint64_t seed = 5);

// non-Carleson oscillation witness vs smooth bump under refinement
json carleson_witness();

// generic config-driven runs used by the CLI
json run_solve(const ExperimentConfig& cfg, const std::string& out_dir);
json run_kernel(const ExperimentConfig& cfg, const std::string& out_dir);
json run_carleson(const ExperimentConfig& cfg, const std::string& out_dir);
json run_p0(const json& in);

}  // namespace experiments
}  // namespace pmlab

#endif
