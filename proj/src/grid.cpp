#include "pmlab/grid.hpp"

#include <cmath>

namespace pmlab {

Grid Grid::make(int n, double H, int nx0, std::array<double, 2> lo, std::array<double, 2> hi,
                double hx, double T, double ht) {
    if (n < 1 || n > 3) throw ConfigError("spatial dimension must be 1, 2 or 3");
    Grid g;
    g.n = n;
    g.nx0 = nx0;
    g.h = H / nx0;
    g.hx = hx;
    g.lat_lo = lo;
    for (int a = 0; a < n - 1; ++a) {
        double len = hi[a] - lo[a];
        g.nlat[a] = std::max(1, static_cast<int>(std::lround(len / hx)));
    }
    g.ht = ht;
    g.nt = std::max(1, static_cast<int>(std::lround(T / ht)));
    return g;
}

std::pair<double, double> sym_eig_range(const SymMat& m) {
    if (m.n == 1) return {m(0, 0), m(0, 0)};
    if (m.n == 2) {
        double tr = m(0, 0) + m(1, 1);
        double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return {tr / 2.0 - disc, tr / 2.0 + disc};
    }
    // 3x3: cyclic Jacobi sweeps
    double a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);
    for (int sweep = 0; sweep < 30; ++sweep) {
        double off = sqr(a[0][1]) + sqr(a[0][2]) + sqr(a[1][2]);
        if (off < 1e-30) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    double lo = std::min({a[0][0], a[1][1], a[2][2]});
    double hi = std::max({a[0][0], a[1][1], a[2][2]});
    return {lo, hi};
}

}  // namespace pmlab
