#ifndef PMLAB_GRID_HPP
#define PMLAB_GRID_HPP

#include <array>
#include <cassert>
#include <vector>

#include "pmlab/common.hpp"

namespace pmlab {

// Cell-centered space-time grid on the pulled-back slab
//   U_H = { (x0, x, t) : 0 < x0 < H, x in lateral box, 0 < t <= T }.
// Coordinates are (x0, x, t) with x0 the height above the (flattened)
// boundary, x the n-1 lateral coordinates and t time.  Heights sit at
// (i+1/2)h, lateral nodes at lo+(j+1/2)hx, time levels at k*ht with the
// initial slice at k=0 and solution steps k=1..nt.
struct Grid {
    int n = 1;       // ambient spatial dimension, 1..3 (n-1 lateral axes)
    int nx0 = 0;     // cells across the slab height
    double h = 0.0;  // height spacing
    std::array<int, 2> nlat{1, 1};
    std::array<double, 2> lat_lo{0.0, 0.0};
    double hx = 0.0;  // lateral spacing (shared by lateral axes)
    int nt = 0;
    double ht = 0.0;

    int lat_axes() const { return n - 1; }
    double height() const { return nx0 * h; }
    double time_end() const { return nt * ht; }
    double spacing(int axis) const { return axis == 0 ? h : hx; }

    double x0(int i) const { return (i + 0.5) * h; }
    double lat(int axis, int j) const { return lat_lo[axis] + (j + 0.5) * hx; }
    double time(int k) const { return k * ht; }

    long ncells() const { return static_cast<long>(nx0) * nlat[0] * nlat[1]; }
    long nlateral() const { return static_cast<long>(nlat[0]) * nlat[1]; }
    long cell(int i0, int j0, int j1) const {
        return i0 + static_cast<long>(nx0) * (j0 + static_cast<long>(nlat[0]) * j1);
    }
    void cell_coords(long c, int& i0, int& j0, int& j1) const {
        i0 = static_cast<int>(c % nx0);
        long r = c / nx0;
        j0 = static_cast<int>(r % nlat[0]);
        j1 = static_cast<int>(r / nlat[0]);
    }
    double cell_volume() const {
        double v = h * ht;
        for (int a = 0; a < lat_axes(); ++a) v *= hx;
        return v;
    }
    // surface measure of one lateral-boundary cell (flat chart: dy ds)
    double sigma_cell() const {
        double v = ht;
        for (int a = 0; a < lat_axes(); ++a) v *= hx;
        return v;
    }

    static Grid make(int n, double H, int nx0, std::array<double, 2> lo,
                     std::array<double, 2> hi, double hx, double T, double ht);
};

// Scalar field on the lateral boundary grid: (j0, j1) x time steps 1..nt.
struct BoundaryField {
    int nlat0 = 1, nlat1 = 1, nt = 0;
    std::vector<double> v;

    BoundaryField() = default;
    BoundaryField(const Grid& g)
        : nlat0(g.nlat[0]), nlat1(g.nlat[1]), nt(g.nt),
          v(static_cast<size_t>(g.nlat[0]) * g.nlat[1] * g.nt, 0.0) {}
    long idx(int j0, int j1, int k) const {
        assert(k >= 1 && k <= nt);
        return j0 + static_cast<long>(nlat0) * (j1 + static_cast<long>(nlat1) * (k - 1));
    }
    double& at(int j0, int j1, int k) { return v[idx(j0, j1, k)]; }
    double at(int j0, int j1, int k) const { return v[idx(j0, j1, k)]; }
    long size() const { return static_cast<long>(v.size()); }
};

// Space-time scalar field over all cells and time levels 0..nt.
struct SpaceTimeField {
    long ncells = 0;
    int nt = 0;
    std::vector<double> v;

    SpaceTimeField() = default;
    SpaceTimeField(const Grid& g, int steps)
        : ncells(g.ncells()), nt(steps),
          v(static_cast<size_t>(g.ncells()) * (steps + 1), 0.0) {}
    double* step(int k) { return v.data() + static_cast<size_t>(k) * ncells; }
    const double* step(int k) const { return v.data() + static_cast<size_t>(k) * ncells; }
    double& at(long c, int k) { return v[static_cast<size_t>(k) * ncells + c]; }
    double at(long c, int k) const { return v[static_cast<size_t>(k) * ncells + c]; }
};

}  // namespace pmlab

#endif
