#include "pmlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pmlab {

namespace {

GraphDomain parse_domain(const json& d, int n, const Grid& grid, double H) {
    ChartGrid chart;
    chart.n = n;
    chart.dx = grid.hx;
    chart.nx = {n >= 2 ? grid.nlat[0] + 1 : 1, n >= 3 ? grid.nlat[1] + 1 : 1};
    chart.lo = {grid.lat_lo[0], grid.lat_lo[1]};
    chart.dt = grid.ht;
    chart.nt = grid.nt + 1;
    chart.t_lo = 0.0;

    json psi = d.value("psi", json{{"kind", "zero"}});
    std::string kind = psi.value("kind", "zero");
    if (kind == "zero") return make_graph_zero(n, chart, H);
    if (kind == "linear") {
        std::array<double, 2> alpha{psi.value("alpha", 0.0), psi.value("alpha1", 0.0)};
        return make_graph_linear(n, chart, H, alpha);
    }
    if (kind == "sine")
        return make_graph_sine(n, chart, H, psi.value("amp", 0.3), psi.value("kx", 1.0),
                               psi.value("kt", 0.0));
    if (kind == "samples") {
        int rows = 0, cols = 0;
        std::vector<double> s = read_csv_grid(psi.at("path").get<std::string>(), rows, cols);
        chart.nt = rows;
        chart.nx = {cols, 1};
        // CSV rows are time-major; re-order to node layout (space fastest)
        std::vector<double> nodes(s.size());
        for (int m = 0; m < rows; ++m)
            for (int j = 0; j < cols; ++j) nodes[chart.node(j, 0, m)] = s[m * cols + j];
        return make_graph_samples(n, chart, H, std::move(nodes));
    }
    throw ConfigError("unknown psi kind: " + kind);
}

CoefficientField parse_coefficients(const json& c, int n, const Grid& grid,
                                    std::uint64_t seed) {
    std::string kind = c.value("kind", "identity");
    if (kind == "identity") return coeff_identity(n);
    if (kind == "diagonal") {
        std::array<double, 3> d{1.0, 1.0, 1.0};
        if (c.contains("diag")) {
            auto v = c.at("diag");
            for (size_t i = 0; i < v.size() && i < 3; ++i) d[i] = v[i].get<double>();
        }
        return coeff_diagonal(n, d);
    }
    if (kind == "random-elliptic")
        return coeff_random_elliptic(n, grid, c.value("lambda", 0.5), c.value("Lambda", 2.0),
                                     c.value("seed", seed));
    if (kind == "oscillatory-witness") return coeff_oscillatory_witness(n);
    if (kind == "bump")
        return coeff_bump(n, c.value("amp", 0.5), c.value("x0", 0.5),
                          {c.value("xc", 0.0), c.value("xc1", 0.0)}, c.value("tc", 0.5),
                          c.value("width", 0.25));
    throw ConfigError("unknown coefficient kind: " + kind);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    json d = j.value("domain", json::object());
    cfg.n = d.value("n", 1);
    double H = d.value("H", 1.0);
    std::array<double, 2> lo{-1.0, -1.0}, hi{1.0, 1.0};
    if (d.contains("lateral")) {
        auto l = d.at("lateral");
        lo[0] = l[0].get<double>();
        hi[0] = l[1].get<double>();
        lo[1] = lo[0];
        hi[1] = hi[0];
    }
    double T = 1.0;
    if (d.contains("time")) T = d.at("time")[1].get<double>();
    int nx0 = d.value("nx0", 64);
    double hx = d.value("hx", cfg.n >= 2 ? (hi[0] - lo[0]) / 64.0 : H / nx0);
    double ht = d.value("ht", hx * hx);  // parabolic scaling by default
    cfg.grid = Grid::make(cfg.n, H, nx0, lo, hi, hx, T, ht);
    cfg.domain = parse_domain(d, cfg.n, cfg.grid, H);
    cfg.seed = j.value("seed", 1);
    cfg.coefficients =
        parse_coefficients(j.value("coefficients", json::object()), cfg.n, cfg.grid, cfg.seed);
    json s = j.value("solver", json::object());
    cfg.solver.tol = s.value("tol", 1e-11);
    cfg.solver.max_iter = s.value("max_iter", 2000);
    cfg.burn_in_frac = s.value("burn_in_frac", 0.125);
    json f = j.value("functionals", json::object());
    cfg.aperture = f.value("aperture", 2.0);
    json p = j.value("pullback", json::object());
    cfg.gamma = p.value("gamma", 0.1);
    cfg.profile_points = p.value("profile_points", 17);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

void write_report(const json& report, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ConfigError("cannot write report: " + tmp);
        out << report.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot rename report into place: " + path);
}

void write_boundary_csv(const BoundaryField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write csv: " + path);
    out.precision(17);
    for (int k = 1; k <= f.nt; ++k) {
        for (int j1 = 0; j1 < f.nlat1; ++j1)
            for (int j0 = 0; j0 < f.nlat0; ++j0) {
                if (j0 + j1 > 0) out << ",";
                out << f.at(j0, j1, k);
            }
        out << "\n";
    }
}

void write_slice_csv(const Grid& g, const SpaceTimeField& f, int step,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write csv: " + path);
    out.precision(17);
    for (int i0 = 0; i0 < g.nx0; ++i0) {
        for (int j1 = 0; j1 < g.nlat[1]; ++j1)
            for (int j0 = 0; j0 < g.nlat[0]; ++j0) {
                if (j0 + j1 > 0) out << ",";
                out << f.at(g.cell(i0, j0, j1), step);
            }
        out << "\n";
    }
}

std::vector<double> read_csv_grid(const std::string& path, int& rows, int& cols) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open csv: " + path);
    std::vector<double> v;
    std::string line;
    rows = 0;
    cols = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int c = 0;
        while (std::getline(ss, cell, ',')) {
            v.push_back(std::stod(cell));
            ++c;
        }
        if (cols < 0)
            cols = c;
        else if (c != cols)
            throw ConfigError("ragged csv: " + path);
        ++rows;
    }
    return v;
}

}  // namespace pmlab
