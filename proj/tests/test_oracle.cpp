#include <doctest.h>

#include <cmath>

#include "pmlab/oracle.hpp"
#include "pmlab/quadrature.hpp"

using namespace pmlab;

TEST_SUITE("oracle") {

TEST_CASE("kernel mass is one at every height") {
    for (double x0 : {0.1, 1.0, 10.0})
        CHECK(std::abs(oracle::kernel_mass(x0, 1) - 1.0) < 1e-10);
    CHECK(std::abs(oracle::kernel_mass(1.0, 2) - 1.0) < 1e-8);
    CHECK(std::abs(oracle::kernel_mass(0.5, 3) - 1.0) < 1e-8);
}

TEST_CASE("constant data reproduces the mass") {
    std::vector<double> times{0.0, 1.0}, values{1.0, 1.0};
    for (double x0 : {0.05, 0.3})
        for (double t : {0.5, 0.9}) {
            double v = oracle::halfspace_solution_sampled(times, values, x0, t);
            CHECK(std::abs(v - 1.0) < 1e-9);
        }
}

TEST_CASE("pulse values agree across two independent quadratures") {
    oracle::GaussianPulse f;
    f.t_center = 0.3;
    f.t_width = 0.05;
    for (double x0 : {0.05, 0.2, 0.6})
        for (double t : {0.35, 0.5, 0.9}) {
            double a = oracle::halfspace_solution_gaussian(1, f, x0, nullptr, t);
            auto integrand = [&](double tau) {
                return oracle::caloric_kernel(1, x0, nullptr, tau) * f.time_factor(t - tau);
            };
            double b = gauss_panels(integrand, 1e-14, t, 4000);
            CHECK(std::abs(a - b) < 1e-6);
        }
}

TEST_CASE("halfspace values obey the maximum principle") {
    oracle::GaussianPulse f;
    f.t_center = 0.4;
    f.t_width = 0.08;
    for (double x0 : {0.02, 0.1, 0.5, 1.5})
        for (double t : {0.1, 0.45, 0.8}) {
            double v = oracle::halfspace_solution_gaussian(1, f, x0, nullptr, t);
            CHECK(v >= -1e-12);
            CHECK(v <= 1.0 + 1e-12);
        }
}

TEST_CASE("cone slice constants") {
    CHECK(oracle::cone_slice_constant(1, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(oracle::cone_slice_constant(2, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(oracle::cone_slice_constant(1, 2.0) == doctest::Approx(8.0).epsilon(1e-14));
    // Monte Carlo cross-check at 1e7 samples
    for (int n : {1, 2, 3}) {
        double c = oracle::cone_slice_constant(n, 1.5);
        double mc = oracle::cone_slice_constant_mc(n, 1.5, 10000000, 1234);
        CHECK(std::abs(mc - c) / c < 0.005);
    }
}

TEST_CASE("kernel satisfies the heat equation away from tau=0") {
    double d = 1e-3;
    for (double x0 : {0.5, 1.0})
        for (double tau : {0.3, 0.7}) {
            auto k = [&](double a, double b) { return oracle::caloric_kernel(1, a, nullptr, b); };
            double ut = (k(x0, tau + d) - k(x0, tau - d)) / (2 * d);
            double uxx = (k(x0 + d, tau) - 2 * k(x0, tau) + k(x0 - d, tau)) / (d * d);
            CHECK(std::abs(ut - uxx) < 1e-4);
        }
}

TEST_CASE("indicator data matches the direct kernel integral") {
    std::vector<double> times, values;
    int m = 8192;
    for (int i = 0; i <= m; ++i) {
        double t = 1.0 * i / m;
        times.push_back(t);
        values.push_back(t >= 0.2 && t <= 0.4 ? 1.0 : 0.0);
    }
    double via_data = oracle::halfspace_solution_sampled(times, values, 0.3, 0.9);
    double direct = oracle::kernel_cell_weight(1, 0.3, nullptr, 0.9, nullptr, 0.0, 0.2, 0.4);
    CHECK(std::abs(via_data - direct) < 2e-4);
}

TEST_CASE("generic and gaussian halfspace routes agree in 2d") {
    oracle::GaussianPulse f;
    f.t_center = 0.3;
    f.t_width = 0.06;
    f.x_center = {0.2, 0.0};
    f.x_width = {0.4, 0.4};
    auto fn = [&](const double* y, double s) {
        return f.time_factor(s) * std::exp(-0.5 * sqr((y[0] - f.x_center[0]) / f.x_width[0]));
    };
    double x[1] = {0.1};
    double a = oracle::halfspace_solution_gaussian(2, f, 0.25, x, 0.7);
    double b = oracle::halfspace_solution_generic(2, fn, -8.0, 8.0, 0.25, x, 0.7);
    CHECK(std::abs(a - b) < 1e-6);
}

}  // TEST_SUITE
