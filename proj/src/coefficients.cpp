#include "pmlab/coefficients.hpp"

#include <cmath>

namespace pmlab {

CoefficientField coeff_identity(int n) {
    CoefficientField f;
    f.n = n;
    f.A = [n](const Grid&, long, int) { return SymMat::identity(n); };
    return f;
}

CoefficientField coeff_diagonal(int n, std::array<double, 3> d) {
    CoefficientField f;
    f.n = n;
    f.A = [n, d](const Grid&, long, int) { return SymMat::diagonal(n, d); };
    return f;
}

namespace {

// random rotation (2d angle / 3d composed Givens) applied to a diagonal
SymMat random_spd(int n, Rng& rng, double lam, double Lam) {
    SymMat m;
    m.n = n;
    if (n == 1) {
        m(0, 0) = rng.uniform(lam, Lam);
        return m;
    }
    double eig[3];
    for (int i = 0; i < n; ++i) eig[i] = rng.uniform(lam, Lam);
    double R[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    auto rotate = [&](int p, int q) {
        double th = rng.uniform(0.0, 6.283185307179586);
        double c = std::cos(th), s = std::sin(th);
        for (int i = 0; i < n; ++i) {
            double a = R[i][p], b = R[i][q];
            R[i][p] = c * a - s * b;
            R[i][q] = s * a + c * b;
        }
    };
    rotate(0, 1);
    if (n == 3) {
        rotate(0, 2);
        rotate(1, 2);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int q = 0; q < n; ++q) s += R[i][q] * eig[q] * R[j][q];
            m(i, j) = s;
            m(j, i) = s;
        }
    // damp off-diagonals to diagonal dominance; A_eta = eta A + (1-eta) diag(A)
    // has spectrum inside [lam, Lam] for eta in [0,1]
    double eta = 1.0;
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) off += std::abs(m(i, j));
        if (off > m(i, i)) eta = std::min(eta, 0.999 * m(i, i) / off);
    }
    if (eta < 1.0)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) m(i, j) *= eta;
    return m;
}

}  // namespace

CoefficientField coeff_random_elliptic(int n, const Grid& grid, double lam, double Lam,
                                       std::uint64_t seed) {
    auto samples = std::make_shared<std::vector<SymMat>>();
    samples->reserve(grid.ncells());
    Rng rng(seed);
    for (long c = 0; c < grid.ncells(); ++c) samples->push_back(random_spd(n, rng, lam, Lam));
    CoefficientField f;
    f.n = n;
    f.A = [samples](const Grid&, long cell, int) { return (*samples)[cell]; };
    return f;
}

CoefficientField coeff_oscillatory_witness(int n) {
    CoefficientField f;
    f.n = n;
    f.A = [n](const Grid& g, long cell, int) {
        int i0, j0, j1;
        g.cell_coords(cell, i0, j0, j1);
        double x0 = g.x0(i0);
        double a = 2.0 + std::sin(std::log(1.0 / x0));
        SymMat m = SymMat::identity(n);
        for (int i = 0; i < n; ++i) m(i, i) = a;
        return m;
    };
    return f;
}

CoefficientField coeff_bump(int n, double amp, double x0_c, std::array<double, 2> x_c,
                            double t_c, double w) {
    CoefficientField f;
    f.n = n;
    f.time_dependent = true;
    f.A = [=](const Grid& g, long cell, int k) {
        int i0, j0, j1;
        g.cell_coords(cell, i0, j0, j1);
        double d2 = sqr(g.x0(i0) - x0_c);
        if (n >= 2) d2 += sqr(g.lat(0, j0) - x_c[0]);
        if (n >= 3) d2 += sqr(g.lat(1, j1) - x_c[1]);
        d2 += std::abs(g.time(k) - t_c);
        double u = d2 / sqr(w);
        SymMat m = SymMat::identity(n);
        if (u < 1.0) {
            double b = amp * std::exp(1.0 - 1.0 / (1.0 - u));
            for (int i = 0; i < n; ++i) m(i, i) += b;
        }
        return m;
    };
    return f;
}

CoefficientField coeff_from_transformed(std::shared_ptr<const TransformedCoefficients> tc) {
    CoefficientField f;
    f.n = tc->n;
    f.time_dependent = true;
    f.A = [tc](const Grid&, long cell, int k) { return tc->A_at(cell, k); };
    f.B = [tc](const Grid&, long cell, int k) { return tc->B_at(cell, k); };
    return f;
}

}  // namespace pmlab
