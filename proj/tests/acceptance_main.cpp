// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Criteria are pinned here, tolerances included; the drivers live
// in the core library so the CLI exposes the same experiments.

#include <chrono>
#include <cstdio>
#include <string>

#include "pmlab/experiments.hpp"

using pmlab::experiments::json;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, const json& rep, const std::string& detail) {
    bool pass = rep.value("pass", false);
    if (!pass) ++g_failures;
    std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

template <typename F>
json timed(F&& f, double* seconds) {
    auto t0 = std::chrono::steady_clock::now();
    json r = f();
    *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

int main() {
    double sec = 0.0;

    {
        json r = timed(pmlab::experiments::kernel_oracle, &sec);
        report(1, "adjoint weights vs analytic kernel (n=1, 256x512)", r,
               "rel L1 " + fmt(r["rel_l1_error"].get<double>()) + ", mass " +
                   fmt(r["total_mass"].get<double>()) + ", " +
                   fmt(r["runtime_seconds"].get<double>()) + " s");
    }
    {
        json r = timed([] { return pmlab::experiments::unit_mass_positivity(10, 11); }, &sec);
        double worst = 0.0;
        for (const auto& row : r["fields"])
            worst = std::max(worst, std::abs(row["total_mass"].get<double>() - 1.0));
        report(2, "unit mass and positivity over 10 random elliptic fields", r,
               "worst mass defect " + fmt(worst));
    }
    {
        json r = timed([] { return pmlab::experiments::max_comparison(100, 7); }, &sec);
        report(3, "maximum/comparison principle over 100 random pairs", r,
               "bound defect " + fmt(r["max_bound_violation"].get<double>()) +
                   ", comparison defect " + fmt(r["max_comparison_violation"].get<double>()));
    }
    {
        json r = timed(pmlab::experiments::square_identity, &sec);
        std::string d;
        for (const char* key : {"n1", "n2"})
            for (const auto& c : r[key]["cases"])
                d += fmt(c["ratio"].get<double>()) + " ";
        report(4, "square-function identity vs cone-slice constant", r, "ratios " + d);
    }
    {
        json r = timed([] { return pmlab::experiments::bmo_check(50, 23); }, &sec);
        report(5, "bounded-data energy stability + BMO log family", r,
               "max/median " + fmt(r["max_over_median"].get<double>()));
    }
    {
        json r = timed(pmlab::experiments::ainfty_experiment, &sec);
        report(6, "epsilon(delta) strictly decreasing + knapsack optimality", r,
               std::to_string(r["bruteforce_cases"].get<int>()) + " brute-force cases");
    }
    {
        json r = timed(pmlab::experiments::doubling_experiment, &sec);
        report(7, "doubling over 3 octaves, stable under refinement", r,
               "drift " + fmt(r["refinement_drift"].get<double>()));
    }
    {
        json r = timed([] { return pmlab::experiments::lower_bound_experiment_driver(true); },
                       &sec);
        report(8, "square-function lower bound with good cover", r,
               "c_meas " + fmt(r["main"]["c_meas"].get<double>()) + ", slope " +
                   fmt(r["length_slope"].get<double>()));
    }
    {
        json r = timed([] { return pmlab::experiments::exponent_checks(5); }, &sec);
        report(9, "exponent calculus + stopping-time certificate", r,
               "worst residual " + fmt(r["delta0_worst_residual"].get<double>()));
    }
    {
        json r = timed(pmlab::experiments::carleson_witness, &sec);
        report(10, "non-Carleson witness grows, bump stays stable", r,
               "slope " + fmt(r["fitted_slope"].get<double>()) + " vs theory " +
                   fmt(r["theoretical_slope"].get<double>()));
    }

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
