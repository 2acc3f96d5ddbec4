#pragma once

#include "mfatopo/critical_points.hpp"
#include "mfatopo/field.hpp"
#include "mfatopo/model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testsupport {

using mfatopo::Box;
using mfatopo::MfaModel;
using mfatopo::Vec2;

inline MfaModel random_model(std::mt19937_64& rng, int degree, int su, int sv, Box domain = {{-1.0, -2.0}, {3.0, 1.0}}) {
    auto ku = mfatopo::KnotVector::uniform(degree, su);
    auto kv = mfatopo::KnotVector::uniform(degree, sv);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> ctrl(static_cast<std::size_t>(ku.num_ctrl()) * kv.num_ctrl());
    for (double& c : ctrl) c = u(rng);
    return MfaModel(ku, kv, ctrl, domain);
}

inline Vec2 random_point(std::mt19937_64& rng, const Box& b, double margin = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {b.lo[0] + margin + u(rng) * (b.width(0) - 2 * margin), b.lo[1] + margin + u(rng) * (b.width(1) - 2 * margin)};
}

// Model whose control points are sampled from fn at the Greville abscissae;
// exact for polynomials of degree <= 1 only, otherwise a fine approximation.
inline MfaModel model_from(const std::function<double(const Vec2&)>& fn, Box domain, int degree, int spans) {
    auto grid = [&] {
        mfatopo::GridData g;
        g.nx = g.ny = 8 * spans + 1;
        g.domain = domain;
        g.values.resize(static_cast<std::size_t>(g.nx) * g.ny);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) g.at(i, j) = fn(g.position(i, j));
        return g;
    }();
    return mfatopo::fit(grid, degree, spans + degree, spans + degree);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// Cox-de Boor recursion straight from the definition.
inline double cox_de_boor(const std::vector<double>& t, int j, int p, double u) {
    if (p == 0) {
        const bool last = u == t.back() && t[j] < t[j + 1] && t[j + 1] == t.back();
        return (t[j] <= u && u < t[j + 1]) || last ? 1.0 : 0.0;
    }
    double a = 0.0, b = 0.0;
    if (t[j + p] > t[j]) a = (u - t[j]) / (t[j + p] - t[j]) * cox_de_boor(t, j, p - 1, u);
    if (t[j + p + 1] > t[j + 1]) b = (t[j + p + 1] - u) / (t[j + p + 1] - t[j + 1]) * cox_de_boor(t, j + 1, p - 1, u);
    return a + b;
}

struct DenseCritical {
    Vec2 position;
    mfatopo::CriticalKind kind;
};

// Critical points from an n x n lattice scan: a lattice cell is a candidate
// when both gradient components change sign across its corners; candidates are
// then polished by a few Newton steps with the field's own derivatives and
// typed by the Hessian. Points within `merge` are merged.
inline std::vector<DenseCritical> dense_scan(const mfatopo::ScalarField& field, int n, double merge) {
    const Box& b = field.domain();
    std::vector<Vec2> grad(static_cast<std::size_t>(n) * n);
    auto pos = [&](int i, int j) {
        return Vec2(b.lo[0] + b.width(0) * i / (n - 1), b.lo[1] + b.width(1) * j / (n - 1));
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) grad[static_cast<std::size_t>(i) * n + j] = field.eval(pos(i, j), 1).grad;
    std::vector<DenseCritical> out;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            bool mixed[2] = {false, false};
            for (int d = 0; d < 2; ++d) {
                double lo = 1e300, hi = -1e300;
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c) {
                        const double v = grad[static_cast<std::size_t>(i + a) * n + j + c][d];
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                mixed[d] = lo <= 0.0 && hi >= 0.0;
            }
            if (!mixed[0] || !mixed[1]) continue;
            Vec2 x = 0.5 * (pos(i, j) + pos(i + 1, j + 1));
            bool ok = false;
            for (int it = 0; it < 50; ++it) {
                const auto s = field.eval(x, 2);
                if (s.grad.norm() < 1e-12) {
                    ok = true;
                    break;
                }
                const double det = s.hess.determinant();
                if (std::abs(det) < 1e-300) break;
                x -= s.hess.inverse() * s.grad;
                if (!b.contains(x)) break;
            }
            if (!ok) {
                const auto s = field.eval(x, 1);
                ok = b.contains(x) && s.grad.norm() < 1e-9;
            }
            // keep roots that lie in or next to the candidate cell
            const double cell = std::max(b.width(0), b.width(1)) / (n - 1);
            if (!ok || (x - 0.5 * (pos(i, j) + pos(i + 1, j + 1))).norm() > 2.0 * cell) continue;
            bool dup = false;
            for (const auto& c : out)
                if ((c.position - x).norm() < merge) dup = true;
            if (dup) continue;
            out.push_back({x, mfatopo::classify(field, x)});
        }
    return out;
}

}  // namespace testsupport
