#include "pmlab/oracle.hpp"

#include <cmath>

#include "pmlab/quadrature.hpp"

namespace pmlab {
namespace oracle {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;
}  // namespace

double caloric_kernel(int n, double x0, const double* dy, double tau) {
    if (tau <= 0.0) return 0.0;
    double v = x0 / (2.0 * kSqrtPi) * std::pow(tau, -1.5) * std::exp(-x0 * x0 / (4.0 * tau));
    for (int a = 0; a < n - 1; ++a)
        v *= std::exp(-dy[a] * dy[a] / (4.0 * tau)) / std::sqrt(4.0 * kPi * tau);
    return v;
}

double kernel_mass(double x0, int n, double tol) {
    // time integral: substitute u = x0^2/(4 tau), then w = sqrt(u):
    //   int_0^inf k1d dtau = (2/sqrt(pi)) int_0^inf e^{-w^2} dw
    double time_mass =
        2.0 / kSqrtPi *
        adaptive_simpson([](double w) { return std::exp(-w * w); }, 0.0, 9.0, tol * 0.1);
    // lateral Gaussian factor in the scaled variable xi = dy / sqrt(tau)
    double lat_mass = 1.0;
    for (int a = 0; a < n - 1; ++a) {
        double one = adaptive_simpson(
            [](double xi) { return std::exp(-xi * xi / 4.0) / std::sqrt(4.0 * kPi); },
            -40.0, 40.0, tol * 0.1);
        lat_mass *= one;
    }
    return time_mass * lat_mass;
}

double halfspace_solution_gaussian(int n, const GaussianPulse& f, double x0,
                                   const double* x, double t, double tol) {
    if (t <= 0.0 || x0 <= 0.0) return 0.0;
    // Gaussian convolved with the lateral heat factor in closed form:
    //   N(0, 2 tau) * [amp e^{-(y-c)^2/(2w^2)}]
    //     = amp sqrt(w^2/(w^2+2tau)) e^{-(x-c)^2/(2(w^2+2tau))}
    auto lateral = [&](double tau) {
        double v = 1.0;
        for (int a = 0; a < n - 1; ++a) {
            double w2 = sqr(f.x_width[a]);
            double s2 = w2 + 2.0 * tau;
            v *= std::sqrt(w2 / s2) * std::exp(-0.5 * sqr(x[a] - f.x_center[a]) / s2);
        }
        return v;
    };
    // substitute tau = x0^2/(4 w^2): v = (2/sqrt(pi)) int e^{-w^2} F(tau(w)) dw
    double wmin = x0 / (2.0 * std::sqrt(t));
    auto integrand = [&](double w) {
        double tau = x0 * x0 / (4.0 * w * w);
        return std::exp(-w * w) * lateral(tau) * f.time_factor(t - tau);
    };
    return 2.0 / kSqrtPi * adaptive_simpson(integrand, wmin, wmin + 10.0, tol);
}

double halfspace_solution_generic(int n, const std::function<double(const double*, double)>& f,
                                  double lat_lo, double lat_hi, double x0, const double* x,
                                  double t, double tol) {
    if (t <= 0.0 || x0 <= 0.0) return 0.0;
    double wmin = x0 / (2.0 * std::sqrt(t));
    auto integrand_w = [&](double w) {
        double tau = x0 * x0 / (4.0 * w * w);
        double s = t - tau;
        double lat = 0.0;
        if (n == 1) {
            lat = f(nullptr, s);
        } else if (n == 2) {
            auto g = [&](double y) {
                double dy = x[0] - y;
                return std::exp(-dy * dy / (4.0 * tau)) / std::sqrt(4.0 * kPi * tau) * f(&y, s);
            };
            lat = adaptive_simpson(g, lat_lo, lat_hi, tol * 0.05);
        } else {
            auto g1 = [&](double y1) {
                auto g0 = [&](double y0) {
                    double yy[2] = {y0, y1};
                    double d0 = x[0] - y0, d1 = x[1] - y1;
                    return std::exp(-(d0 * d0 + d1 * d1) / (4.0 * tau)) /
                           (4.0 * kPi * tau) * f(yy, s);
                };
                return adaptive_simpson(g0, lat_lo, lat_hi, tol * 0.02);
            };
            lat = adaptive_simpson(g1, lat_lo, lat_hi, tol * 0.05);
        }
        return std::exp(-w * w) * lat;
    };
    return 2.0 / kSqrtPi * adaptive_simpson(integrand_w, wmin, wmin + 10.0, tol);
}

double halfspace_solution_sampled(const std::vector<double>& f_times,
                                  const std::vector<double>& f_values, double x0, double t,
                                  double tol) {
    if (t <= 0.0 || x0 <= 0.0) return 0.0;
    // data held constant outside the sampled window
    if (t <= f_times.front()) return f_values.front();
    // sampled window: piecewise-linear data, per-interval quadrature (immune
    // to narrow supports that defeat a single adaptive pass)
    double v = 0.0;
    double span = std::max(t - f_times.front(), 1e-300);
    for (size_t i = 0; i + 1 < f_times.size(); ++i) {
        double a = f_times[i], b = std::min(f_times[i + 1], t);
        if (b <= a) continue;
        double ta = f_times[i], tb = f_times[i + 1];
        double fa = f_values[i], fb = f_values[i + 1];
        auto integrand = [&](double s) {
            double al = (s - ta) / (tb - ta);
            return caloric_kernel(1, x0, nullptr, t - s) * ((1.0 - al) * fa + al * fb);
        };
        v += adaptive_simpson(integrand, a, b, tol * (b - a) / span, 24);
    }
    // analytic tail below the window: f(front) times the kernel mass of
    // tau > t - t_front, which is erf(x0 / (2 sqrt(t - t_front)))
    if (f_values.front() != 0.0)
        v += f_values.front() * std::erf(x0 / (2.0 * std::sqrt(t - f_times.front())));
    return v;
}

double cone_slice_constant(int n, double a) {
    // measure of {|x| + |t|^{1/2} < a}: int over the lateral ball of
    // 2 (a - |x|)^2 dx
    switch (n) {
        case 1:
            return 2.0 * a * a;
        case 2:
            // 2 * int_{-a}^{a} (a-|x|)^2 dx = 4 a^3 / 3
            return 4.0 * a * a * a / 3.0;
        case 3: {
            // 2 * int_{|x|<a} (a-|x|)^2 dx = 4 pi int_0^a r (a-r)^2 dr = pi a^4/3
            return kPi * a * a * a * a / 3.0;
        }
        default: {
            // one-dimensional radial reduction for general lateral dimension
            int m = n - 1;
            double surf = 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m);
            return surf * adaptive_simpson(
                              [&](double r) {
                                  return std::pow(r, m - 1) * 2.0 * sqr(a - r);
                              },
                              0.0, a, 1e-12);
        }
    }
}

double cone_slice_constant_mc(int n, double a, long samples, std::uint64_t seed) {
    Rng rng(seed);
    // sample the box |x_i| < a, |t| < a^2
    double box = std::pow(2.0 * a, n - 1) * 2.0 * a * a;
    long hit = 0;
    for (long s = 0; s < samples; ++s) {
        double r2 = 0.0;
        for (int i = 0; i < n - 1; ++i) r2 += sqr(rng.uniform(-a, a));
        double t = rng.uniform(-a * a, a * a);
        if (std::sqrt(r2) + std::sqrt(std::abs(t)) < a) ++hit;
    }
    return box * static_cast<double>(hit) / static_cast<double>(samples);
}

double kernel_cell_weight(int n, double x0, const double* x, double t, const double* y,
                          double hy, double s0, double s1) {
    // integrate over the cell's time extent (clipped to s < t) and lateral box
    double lo = s0, hi = std::min(s1, t);
    if (hi <= lo) return 0.0;
    auto time_integrand = [&](double s) {
        double tau = t - s;
        if (tau <= 0.0) return 0.0;
        double v = x0 / (2.0 * kSqrtPi) * std::pow(tau, -1.5) *
                   std::exp(-x0 * x0 / (4.0 * tau));
        for (int a = 0; a < n - 1; ++a) {
            auto g = [&](double yy) {
                double d = x[a] - yy;
                return std::exp(-d * d / (4.0 * tau)) / std::sqrt(4.0 * kPi * tau);
            };
            v *= gauss_panels(g, y[a] - 0.5 * hy, y[a] + 0.5 * hy, 2);
        }
        return v;
    };
    return gauss_panels(time_integrand, lo, hi, 4);
}

}  // namespace oracle
}  // namespace pmlab
