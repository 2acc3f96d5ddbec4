#include "mfatopo/critical_points.hpp"

#include "mfatopo/parallel.hpp"
#include "mfatopo/spatial_hash.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mfatopo {

const char* to_string(CriticalKind kind) {
    switch (kind) {
        case CriticalKind::Minimum: return "minimum";
        case CriticalKind::Maximum: return "maximum";
        case CriticalKind::Saddle: return "saddle";
        case CriticalKind::Degenerate: return "degenerate";
    }
    return "unknown";
}

namespace {

// True when every value in the local block is > 0, or every value is < 0.
bool strict_sign(const std::vector<double>& q, int cols, int r0, int r1, int c0, int c1) {
    bool all_pos = true, all_neg = true;
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
            const double v = q[static_cast<std::size_t>(r) * cols + c];
            all_pos &= v > 0.0;
            all_neg &= v < 0.0;
        }
    return all_pos || all_neg;
}

CriticalKind kind_from_hessian(const Mat2& h, double degeneracy_tol) {
    const double det = h.determinant();
    if (!(std::abs(det) >= degeneracy_tol)) return CriticalKind::Degenerate;
    if (det < 0.0) return CriticalKind::Saddle;
    return h.trace() > 0.0 ? CriticalKind::Minimum : CriticalKind::Maximum;
}

}  // namespace

std::vector<SpanIndex> filter_spans(const MfaModel& model) {
    const int p = model.degree();
    const int n2 = model.ctrl_cols();
    const auto qu = model.derivative_control_points(0);  // (n1-1) x n2
    const auto qv = model.derivative_control_points(1);  // n1 x (n2-1)
    const SpanGrid& grid = model.spans();
    std::vector<SpanIndex> out;
    for (int i = 0; i < grid.count(0); ++i)
        for (int j = 0; j < grid.count(1); ++j) {
            // span (i, j) is knot interval (i + p, j + p); derivative spline along u
            // uses Q rows i..i+p-1, original columns j..j+p
            if (strict_sign(qu, n2, i, i + p - 1, j, j + p)) continue;
            if (strict_sign(qv, n2 - 1, i, i + p, j, j + p - 1)) continue;
            out.push_back(grid.span(i, j));
        }
    return out;
}

CriticalKind classify(const ScalarField& field, const Vec2& x, double degeneracy_tol) {
    if (field.max_order() < 2) throw Error(ErrorKind::Order, "classification needs second derivatives");
    return kind_from_hessian(field.eval(x, 2).hess, degeneracy_tol);
}

std::optional<CriticalPoint> newton_refine(const ScalarField& field, const Vec2& x0, const SpanIndex& span,
                                           const NewtonConfig& cfg) {
    if (field.max_order() < 2) throw Error(ErrorKind::Order, "Newton iteration needs second derivatives");
    const double margin = 1e-9 * std::max(span.bounds.width(0), span.bounds.width(1));
    Vec2 x = x0;
    for (int it = 0; it <= cfg.max_iterations; ++it) {
        const FieldSample s = field.eval(x, 2);
        if (!std::isfinite(s.grad.norm())) return std::nullopt;
        if (s.grad.norm() < cfg.grad_tol) {
            return CriticalPoint{x, s.value, kind_from_hessian(s.hess, cfg.degeneracy_tol)};
        }
        if (it == cfg.max_iterations) break;
        const double det = s.hess.determinant();
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return std::nullopt;
        const Vec2 step = s.hess.partialPivLu().solve(s.grad);
        x -= step;
        if (!span.bounds.contains(x, margin)) return std::nullopt;
    }
    return std::nullopt;
}

CriticalPointSet extract_critical_points(const ScalarField& field, const NewtonConfig& cfg) {
    CriticalPointSet result;
    const SpanGrid& grid = field.spans();
    std::vector<SpanIndex> spans;
    if (const MfaModel* m = field.spline()) {
        spans = filter_spans(*m);
    } else {
        spans.reserve(grid.size());
        for (int k = 0; k < grid.size(); ++k) spans.push_back(grid.span(k));
    }
    result.spans_processed = spans.size();
    const int per_dim = cfg.seeds_per_dim > 0 ? cfg.seeds_per_dim : field.degree() + 3;

    struct SpanOut {
        std::vector<CriticalPoint> pts;
        bool all_flat = true;  // every seed already had a vanishing gradient and Hessian
    };
    std::vector<SpanOut> per_span(spans.size());
    parallel_for_each(spans.size(), cfg.threads, [&](std::size_t k) {
        SpanOut& out = per_span[k];
        for (const Vec2& seed : uniform_seeds(spans[k].bounds, per_dim)) {
            const FieldSample s0 = field.eval(seed, 2);
            if (!(s0.grad.norm() < cfg.grad_tol && s0.hess.norm() < cfg.grad_tol)) out.all_flat = false;
            if (auto cp = newton_refine(field, seed, spans[k], cfg)) out.pts.push_back(*cp);
        }
    });

    if (!spans.empty() &&
        std::all_of(per_span.begin(), per_span.end(), [](const SpanOut& o) { return o.all_flat; })) {
        result.warnings.push_back("field is constant: no isolated critical points");
        return result;
    }

    const double cell = cfg.dedup_cell > 0.0 ? cfg.dedup_cell : grid.span_length() / 4.0;
    SpatialHash hash(cell);
    std::size_t degenerate = 0;
    for (const auto& so : per_span) {
        for (const auto& cp : so.pts) {
            bool dup = false;
            hash.query(cp.position, cell, [&](std::size_t, double) { dup = true; });
            if (dup) continue;
            hash.insert(cp.position, result.points.size());
            result.points.push_back(cp);
            if (cp.kind == CriticalKind::Degenerate) ++degenerate;
        }
    }
    if (degenerate)
        result.warnings.push_back(std::to_string(degenerate) + " degenerate critical point(s) (singular Hessian)");
    std::sort(result.points.begin(), result.points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return lex_less(a.position, b.position); });
    return result;
}

void write_critical_points_csv(const std::vector<CriticalPoint>& points, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    os.precision(17);
    os << "x1,x2,value,kind\n";
    for (const auto& cp : points)
        os << cp.position[0] << ',' << cp.position[1] << ',' << cp.value << ',' << to_string(cp.kind) << '\n';
    if (!os) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace mfatopo
