#include "mfatopo/features.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

namespace mfatopo {

namespace {

// Partials of g = |grad f|^2 up to second order, as a Derivs table.
Derivs grad_norm_sq(const Derivs& f) {
    const double fx = f(1, 0), fy = f(0, 1);
    const double fxx = f(2, 0), fxy = f(1, 1), fyy = f(0, 2);
    const double fxxx = f(3, 0), fxxy = f(2, 1), fxyy = f(1, 2), fyyy = f(0, 3);
    Derivs g;
    g.d[0][0] = fx * fx + fy * fy;
    g.d[1][0] = 2.0 * (fx * fxx + fy * fxy);
    g.d[0][1] = 2.0 * (fx * fxy + fy * fyy);
    g.d[2][0] = 2.0 * (fxx * fxx + fxxx * fx + fxxy * fy + fxy * fxy);
    g.d[1][1] = 2.0 * (fxxy * fx + fxx * fxy + fxyy * fy + fxy * fyy);
    g.d[0][2] = 2.0 * (fxyy * fx + fxy * fxy + fyy * fyy + fyyy * fy);
    return g;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

FieldSample jacobi_sample(const Derivs& f, const Derivs& g, int order) {
    const double fx = f(1, 0), fy = f(0, 1), gx = g(1, 0), gy = g(0, 1);
    FieldSample s;
    s.value = fx * gy - fy * gx;
    if (order < 1) return s;
    const double fxx = f(2, 0), fxy = f(1, 1), fyy = f(0, 2);
    const double gxx = g(2, 0), gxy = g(1, 1), gyy = g(0, 2);
    s.grad[0] = fxx * gy + fx * gxy - fxy * gx - fy * gxx;
    s.grad[1] = fxy * gy + fx * gyy - fyy * gx - fy * gxy;
    if (order < 2) return s;
    const double hxx = f(3, 0) * gy + 2.0 * fxx * gxy + fx * g(2, 1) - f(2, 1) * gx - 2.0 * fxy * gxx - fy * g(3, 0);
    const double hxy = f(2, 1) * gy + fxx * gyy + fx * g(1, 2) - f(1, 2) * gx - fyy * gxx - fy * g(2, 1);
    const double hyy = f(1, 2) * gy + 2.0 * fxy * gyy + fx * g(0, 3) - f(0, 3) * gx - 2.0 * fyy * gxy - fy * g(1, 2);
    s.hess << hxx, hxy, hxy, hyy;
    return s;
}

FieldSample ridge_valley_sample(const Derivs& f, int order) {
    return jacobi_sample(f, grad_norm_sq(f), std::min(order, 1));
}

JacobiField::JacobiField(const MfaModel& f, const MfaModel& g) : f_(f), g_(g) {
    if (!f.same_spans(g)) throw Error(ErrorKind::Validation, "Jacobi set needs f and g on identical knots and domain");
}

FieldSample JacobiField::eval(const Vec2& x, int order) const {
    const int o = std::min(order + 1, kMaxDerivOrder);
    return jacobi_sample(f_.derivs(x, o), g_.derivs(x, o), order);
}

RidgeValleyField::RidgeValleyField(const MfaModel& f) : f_(f) {
    if (f.degree() < 3)
        throw Error(ErrorKind::Order, "ridge-valley extraction needs third derivatives (degree >= 3), got degree " +
                                          std::to_string(f.degree()));
}

FieldSample RidgeValleyField::eval(const Vec2& x, int order) const {
    return ridge_valley_sample(f_.derivs(x, std::min(order + 2, kMaxDerivOrder)), order);
}

Mat2 RidgeValleyField::g_hessian(const Derivs& d) const { return grad_norm_sq(d).hessian(); }

TraceConfig make_trace_config(const ScalarField& field, const FeatureOptions& opt, int default_seeds) {
    TraceConfig cfg = TraceConfig::defaults(field, opt.step_divisor, opt.gamma_factor);
    cfg.epsilon = opt.epsilon;
    cfg.seeds_per_dim = opt.seeds_per_dim > 0 ? opt.seeds_per_dim : default_seeds;
    cfg.threads = opt.threads;
    cfg.validate(field.spans());
    return cfg;
}

namespace {

FeatureResult finish(LevelSetResult&& ls, std::vector<CriticalPoint> inserted, std::vector<std::string> warnings,
                     const std::string& task) {
    FeatureResult r;
    r.graph = std::move(ls.graph);
    r.graph.task = task;
    r.stats = ls.stats;
    r.inserted = std::move(inserted);
    r.warnings = std::move(warnings);
    r.warnings.insert(r.warnings.end(), ls.warnings.begin(), ls.warnings.end());
    return r;
}

std::vector<CriticalPoint> near_level(const std::vector<CriticalPoint>& pts, double a, double eps) {
    std::vector<CriticalPoint> out;
    for (const auto& cp : pts)
        if (std::abs(cp.value - a) < eps) out.push_back(cp);
    return out;
}

}  // namespace

FeatureResult extract_contour(const MfaModel& f, double a, const FeatureOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelField field(f);
    const TraceConfig cfg = make_trace_config(field, opt, f.degree() + 3);
    NewtonConfig ncfg;
    ncfg.threads = opt.threads;
    CriticalPointSet cps = extract_critical_points(field, ncfg);
    auto inserted = near_level(cps.points, a, opt.epsilon);
    FeatureResult r = finish(trace_level_set(field, a, inserted, cfg), std::move(inserted), cps.warnings, "contour");
    r.wall_time = elapsed(t0);
    return r;
}

FeatureResult extract_jacobi(const MfaModel& f, const MfaModel& g, const FeatureOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    JacobiField field(f, g);
    const int seeds = f.degree() + g.degree() + 2;
    const TraceConfig cfg = make_trace_config(field, opt, seeds);
    NewtonConfig ncfg;
    ncfg.threads = opt.threads;
    ncfg.seeds_per_dim = cfg.seeds_per_dim;
    CriticalPointSet cps = extract_critical_points(field, ncfg);
    auto inserted = near_level(cps.points, 0.0, opt.epsilon);
    std::vector<std::string> warnings;
    for (const auto& w : cps.warnings)
        if (w.rfind("field is constant", 0) != 0) warnings.push_back("h: " + w);
    FeatureResult r = finish(trace_level_set(field, 0.0, inserted, cfg), std::move(inserted), warnings, "jacobi");
    r.wall_time = elapsed(t0);
    return r;
}

FeatureResult extract_ridge_valley(const MfaModel& f, const FeatureOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    RidgeValleyField field(f);
    const TraceConfig cfg = make_trace_config(field, opt, 3 * f.degree() + 2);
    NewtonConfig ncfg;
    ncfg.threads = opt.threads;
    CriticalPointSet cps = extract_critical_points(ModelField(f), ncfg);
    FeatureResult r = finish(trace_level_set(field, 0.0, cps.points, cfg), cps.points, cps.warnings, "ridge-valley");

    auto& verts = r.graph.vertices();
    r.graph.labels.assign(verts.size(), ArcClass::Unclassified);
    for (std::size_t k = 0; k < verts.size(); ++k) {
        if (verts[k].kind != VertexKind::Regular) continue;
        const Derivs d = f.derivs(verts[k].position, 2);
        if (d.gradient().norm() <= 1e-12) continue;
        const auto c = directional_curvatures(f, verts[k].position);
        r.graph.labels[k] = classify_sign_pair(c.f_mm, c.g_mm, opt.class_tolerance);
    }
    r.arcs = build_arcs(r.graph);
    r.wall_time = elapsed(t0);
    return r;
}

DirectionalCurvatures directional_curvatures(const MfaModel& f, const Vec2& x, double min_grad) {
    const Derivs d = f.derivs(x, 3);
    const auto m = contour_tangent(d.gradient(), min_grad);
    if (!m) throw Error(ErrorKind::Domain, "classification undefined at a critical point of f");
    const Mat2 hg = grad_norm_sq(d).hessian();
    return {m->dot(d.hessian() * *m), m->dot(hg * *m)};
}

ArcClass classify_sign_pair(double f_mm, double g_mm, double class_tolerance) {
    if (!(std::abs(f_mm) >= class_tolerance) || !(std::abs(g_mm) >= class_tolerance)) return ArcClass::Unclassified;
    if (g_mm > 0.0) return f_mm < 0.0 ? ArcClass::Ridge : ArcClass::Valley;
    return f_mm < 0.0 ? ArcClass::PseudoRidge : ArcClass::PseudoValley;
}

ArcClass classify_rv(const MfaModel& f, const Vec2& x, double class_tolerance) {
    const auto c = directional_curvatures(f, x);
    return classify_sign_pair(c.f_mm, c.g_mm, class_tolerance);
}

std::vector<Arc> build_arcs(const TopoGraph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : g.edges()) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    auto label = [&](int v) { return v < static_cast<int>(g.labels.size()) ? g.labels[v] : ArcClass::Unclassified; };
    auto is_break = [&](int v) { return adj[v].size() != 2 || g.vertices()[v].kind != VertexKind::Regular; };

    std::vector<Arc> arcs;
    // Cuts a chain into runs of constant label; the vertex where the label
    // changes closes one run and opens the next.
    auto emit = [&](const std::vector<int>& chain) {
        if (chain.size() < 2) return;
        std::size_t begin = 0;
        auto flush = [&](std::size_t end) {
            Arc arc;
            arc.vertices.assign(chain.begin() + begin, chain.begin() + end + 1);
            std::array<int, 5> votes{};
            for (int v : arc.vertices)
                if (!is_break(v)) ++votes[static_cast<int>(label(v))];
            int best = static_cast<int>(ArcClass::Unclassified);
            for (int c = 0; c < 5; ++c)
                if (votes[c] > votes[best]) best = c;
            arc.label = static_cast<ArcClass>(best);
            arcs.push_back(std::move(arc));
        };
        int current = -1;
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const int v = chain[k];
            if (is_break(v) || label(v) == ArcClass::Unclassified) continue;
            const int l = static_cast<int>(label(v));
            if (current >= 0 && l != current && k > begin) {
                flush(k);
                begin = k;
            }
            current = l;
        }
        flush(chain.size() - 1);
    };

    std::vector<char> visited(n, 0);
    auto walk = [&](int start, int next) {
        std::vector<int> chain{start};
        int prev = start, cur = next;
        visited[start] = 1;
        while (true) {
            chain.push_back(cur);
            if (cur == start || is_break(cur)) break;
            visited[cur] = 1;
            const int nxt = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
            prev = cur;
            cur = nxt;
        }
        return chain;
    };

    for (std::size_t v = 0; v < n; ++v) {
        if (!is_break(static_cast<int>(v))) continue;
        visited[v] = 1;
        for (int w : adj[v]) {
            // each chain between break vertices is walked from its lower end
            if (!is_break(w) && visited[w]) continue;
            if (is_break(w) && w < static_cast<int>(v)) continue;
            emit(walk(static_cast<int>(v), w));
        }
    }
    // pure cycles with no break vertex
    for (std::size_t v = 0; v < n; ++v) {
        if (visited[v] || adj[v].empty()) continue;
        emit(walk(static_cast<int>(v), adj[v][0]));
    }
    return arcs;
}

}  // namespace mfatopo
