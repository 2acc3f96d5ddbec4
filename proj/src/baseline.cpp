#include "mfatopo/baseline.hpp"

#include "mfatopo/features.hpp"
#include "mfatopo/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

namespace mfatopo {

GridData sample(const ScalarField& field, int ratio, int threads) {
    if (ratio < 1) throw Error(ErrorKind::Usage, "sampling ratio must be >= 1");
    const SpanGrid& spans = field.spans();
    GridData g;
    g.nx = spans.count(0) * ratio + 1;
    g.ny = spans.count(1) * ratio + 1;
    g.domain = spans.domain();
    g.values.resize(static_cast<std::size_t>(g.nx) * g.ny);
    parallel_for_each(static_cast<std::size_t>(g.nx), threads, [&](std::size_t i) {
        for (int j = 0; j < g.ny; ++j) g.at(static_cast<int>(i), j) = field.value(g.position(static_cast<int>(i), j));
    });
    return g;
}

TopoGraph marching_squares(const GridData& grid, double a, bool exclude_boundary) {
    grid.validate();
    const int nx = grid.nx, ny = grid.ny;
    std::vector<double> v = grid.values;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double nudge = 1e-12 * std::max(*mx - *mn, 1.0e-300);
    for (double& x : v)
        if (x == a) x += nudge;
    auto val = [&](int i, int j) { return v[static_cast<std::size_t>(i) * ny + j]; };

    TopoGraph g;
    g.isovalue = a;
    // Crossing vertices keyed by lattice edge: horizontal (i,j)-(i+1,j) and vertical (i,j)-(i,j+1).
    std::vector<int> hid(static_cast<std::size_t>(nx) * ny, -1), vid(static_cast<std::size_t>(nx) * ny, -1);
    auto crossing = [&](int i0, int j0, int i1, int j1) {
        std::vector<int>& ids = (i1 != i0) ? hid : vid;
        int& id = ids[static_cast<std::size_t>(i0) * ny + j0];
        if (id >= 0) return id;
        const double v0 = val(i0, j0), v1 = val(i1, j1);
        const double t = (a - v0) / (v1 - v0);
        const Vec2 p0 = grid.position(i0, j0), p1 = grid.position(i1, j1);
        id = g.add_vertex({p0 + t * (p1 - p0), a, VertexKind::Regular});
        return id;
    };
    auto on_boundary = [&](int i0, int j0, int i1, int) {
        if (i0 == i1) return i0 == 0 || i0 == nx - 1;
        return j0 == 0 || j0 == ny - 1;
    };

    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j) {
            // corners counter-clockwise from (i,j); edge k joins corner k and k+1
            const int ci[4] = {i, i + 1, i + 1, i};
            const int cj[4] = {j, j, j + 1, j + 1};
            bool above[4];
            int mask = 0;
            for (int k = 0; k < 4; ++k) {
                above[k] = val(ci[k], cj[k]) > a;
                mask |= above[k] << k;
            }
            if (mask == 0 || mask == 15) continue;
            std::vector<int> cut;
            for (int k = 0; k < 4; ++k)
                if (above[k] != above[(k + 1) % 4]) cut.push_back(k);
            std::vector<std::pair<int, int>> pairs;
            if (cut.size() == 2) {
                pairs.push_back({cut[0], cut[1]});
            } else {
                const double center = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                if ((center > a) == above[0]) {
                    // corners 0 and 2 joined through the center; 1 and 3 are cut off
                    pairs.push_back({0, 1});
                    pairs.push_back({2, 3});
                } else {
                    pairs.push_back({3, 0});
                    pairs.push_back({1, 2});
                }
            }
            for (const auto& [e0, e1] : pairs) {
                const int a0 = e0, b0 = (e0 + 1) % 4, a1 = e1, b1 = (e1 + 1) % 4;
                // lower-index lattice point first so crossings are shared between cells
                auto edge_vertex = [&](int ka, int kb) {
                    int i0 = ci[ka], j0 = cj[ka], i1 = ci[kb], j1 = cj[kb];
                    if (i1 < i0 || j1 < j0) {
                        std::swap(i0, i1);
                        std::swap(j0, j1);
                    }
                    return crossing(i0, j0, i1, j1);
                };
                if (exclude_boundary) {
                    auto bd = [&](int ka, int kb) {
                        return on_boundary(ci[ka], cj[ka], ci[kb], cj[kb]);
                    };
                    if (bd(a0, b0) && bd(a1, b1)) continue;
                }
                g.add_edge(edge_vertex(a0, b0), edge_vertex(a1, b1));
            }
        }
    return g;
}

GridData finite_difference(const GridData& grid, int d1, int d2) {
    GridData cur = grid;
    auto diff = [](const GridData& in, int dim) {
        GridData out = in;
        const int n = dim == 0 ? in.nx : in.ny;
        const double h = in.domain.width(dim) / (n - 1);
        for (int i = 0; i < in.nx; ++i)
            for (int j = 0; j < in.ny; ++j) {
                const int k = dim == 0 ? i : j;
                auto at = [&](int m) { return dim == 0 ? in.at(m, j) : in.at(i, m); };
                double d;
                if (n < 3) d = (at(1) - at(0)) / h;
                else if (k == 0) d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
                else if (k == n - 1) d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
                else d = (at(k + 1) - at(k - 1)) / (2.0 * h);
                out.at(i, j) = d;
            }
        return out;
    };
    for (int k = 0; k < d1; ++k) cur = diff(cur, 0);
    for (int k = 0; k < d2; ++k) cur = diff(cur, 1);
    return cur;
}

namespace {

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridData combine(const GridData& like, const std::function<double(std::size_t)>& fn) {
    GridData out = like;
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = fn(k);
    return out;
}

BaselineResult finish(TopoGraph&& g, const ScalarField& exact, double a, std::chrono::steady_clock::time_point t0,
                      const char* task) {
    BaselineResult r;
    r.wall_time = since(t0);
    r.graph = std::move(g);
    r.graph.task = task;
    r.graph.isovalue = a;
    r.residuals = residuals(r.graph, exact, a);
    return r;
}

}  // namespace

BaselineResult pl_contour(const MfaModel& f, double a, int ratio, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelField field(f);
    TopoGraph g = marching_squares(sample(field, ratio, threads), a);
    return finish(std::move(g), field, a, t0, "contour");
}

BaselineResult pl_jacobi(const MfaModel& f, const MfaModel& g, int ratio, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    JacobiField exact(f, g);
    const GridData sf = sample(ModelField(f), ratio, threads);
    const GridData sg = sample(ModelField(g), ratio, threads);
    const GridData fx = finite_difference(sf, 1, 0), fy = finite_difference(sf, 0, 1);
    const GridData gx = finite_difference(sg, 1, 0), gy = finite_difference(sg, 0, 1);
    const GridData h = combine(sf, [&](std::size_t k) {
        return fx.values[k] * gy.values[k] - fy.values[k] * gx.values[k];
    });
    return finish(marching_squares(h, 0.0, true), exact, 0.0, t0, "jacobi");
}

BaselineResult pl_ridge_valley(const MfaModel& f, int ratio, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    RidgeValleyField exact(f);
    const GridData sf = sample(ModelField(f), ratio, threads);
    const GridData fx = finite_difference(sf, 1, 0), fy = finite_difference(sf, 0, 1);
    const GridData fxx = finite_difference(sf, 2, 0), fxy = finite_difference(sf, 1, 1),
                   fyy = finite_difference(sf, 0, 2);
    const GridData h = combine(sf, [&](std::size_t k) {
        const double x = fx.values[k], y = fy.values[k];
        return 2.0 * ((x * x - y * y) * fxy.values[k] + x * y * (fyy.values[k] - fxx.values[k]));
    });
    return finish(marching_squares(h, 0.0, true), exact, 0.0, t0, "ridge-valley");
}

}  // namespace mfatopo
