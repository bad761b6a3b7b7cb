#ifndef PMLAB_COMMON_HPP
#define PMLAB_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmlab {

// Thrown when a numerical contract cannot be met (solver divergence,
// loss of ellipticity, unresolvable geometry).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on invalid configuration input.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Small dense symmetric matrix, up to 3x3 (spatial dimension n <= 3).
struct SymMat {
    int n = 1;
    std::array<std::array<double, 3>, 3> a{};

    static SymMat identity(int n) {
        SymMat m;
        m.n = n;
        for (int i = 0; i < n; ++i) m.a[i][i] = 1.0;
        return m;
    }
    static SymMat diagonal(int n, const std::array<double, 3>& d) {
        SymMat m;
        m.n = n;
        for (int i = 0; i < n; ++i) m.a[i][i] = d[i];
        return m;
    }
    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }
};

struct Vec3 {
    int n = 1;
    std::array<double, 3> v{};
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

// Eigenvalue range of a small symmetric matrix (n <= 3), closed form for
// n <= 2, Jacobi sweep otherwise.
std::pair<double, double> sym_eig_range(const SymMat& m);

inline double sqr(double x) { return x * x; }

// Deterministic RNG wrapper; all randomness in the project flows through
// explicit seeds recorded in reports.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    // xorshift* core; avoids distribution differences across standard libraries
    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }
    double uniform() {  // in [0,1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        // Box-Muller; always consumes two uniforms
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    int uniform_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

}  // namespace pmlab

#endif
