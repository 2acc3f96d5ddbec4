#pragma once

#include "mfatopo/critical_points.hpp"
#include "mfatopo/field.hpp"
#include "mfatopo/graph.hpp"
#include "mfatopo/tracer.hpp"

#include <string>
#include <vector>

namespace mfatopo {

// h = f_x1 g_x2 - f_x2 g_x1; zero exactly where grad f and grad g are parallel.
// Gradient and Hessian are composed from exact partials of f and g.
class JacobiField final : public ScalarField {
public:
    // Throws Error(Validation) unless f and g share knots and domain.
    JacobiField(const MfaModel& f, const MfaModel& g);

    const SpanGrid& spans() const override { return f_.spans(); }
    int degree() const override { return f_.degree() + g_.degree() - 1; }
    int max_order() const override { return 2; }
    FieldSample eval(const Vec2& x, int order) const override;

private:
    const MfaModel& f_;
    const MfaModel& g_;
};

// h-tilde = f_x1 g_x2 - f_x2 g_x1 with g = |grad f|^2, the ridge-valley condition.
class RidgeValleyField final : public ScalarField {
public:
    // Throws Error(Order) when f has degree < 3.
    explicit RidgeValleyField(const MfaModel& f);

    const SpanGrid& spans() const override { return f_.spans(); }
    int degree() const override { return 3 * f_.degree() - 1; }
    int max_order() const override { return 1; }
    FieldSample eval(const Vec2& x, int order) const override;

    // Hessian of g = |grad f|^2.
    Mat2 g_hessian(const Derivs& d) const;

private:
    const MfaModel& f_;
};

// Exact value/gradient/Hessian of h from the partials of f and g.
FieldSample jacobi_sample(const Derivs& f, const Derivs& g, int order);
// Exact value/gradient of h-tilde from the partials (up to third order) of f.
FieldSample ridge_valley_sample(const Derivs& f, int order);

struct FeatureOptions {
    double step_divisor = 4.0;  // s = l / step_divisor
    double epsilon = 1e-10;
    double gamma_factor = 2.0;  // gamma = gamma_factor * s
    int seeds_per_dim = 0;      // 0: the task default
    int threads = 1;
    double class_tolerance = 1e-9;
};

struct Arc {
    ArcClass label = ArcClass::Unclassified;
    std::vector<int> vertices;  // path through the graph
};

struct FeatureResult {
    TopoGraph graph;
    TraceStats stats;
    std::vector<CriticalPoint> inserted;
    std::vector<Arc> arcs;  // ridge-valley only
    std::vector<std::string> warnings;
    double wall_time = 0.0;
};

TraceConfig make_trace_config(const ScalarField& field, const FeatureOptions& opt, int default_seeds);

FeatureResult extract_contour(const MfaModel& f, double a, const FeatureOptions& opt = {});
// Throws Error(Degenerate) when h vanishes identically (e.g. g = c f).
FeatureResult extract_jacobi(const MfaModel& f, const MfaModel& g, const FeatureOptions& opt = {});
// Throws Error(Order) for degree < 3 and Error(Degenerate) when h-tilde vanishes identically.
FeatureResult extract_ridge_valley(const MfaModel& f, const FeatureOptions& opt = {});

struct DirectionalCurvatures {
    double f_mm = 0.0;
    double g_mm = 0.0;
};
DirectionalCurvatures directional_curvatures(const MfaModel& f, const Vec2& x, double min_grad = 1e-12);
ArcClass classify_sign_pair(double f_mm, double g_mm, double class_tolerance = 1e-9);
// Throws Error(Domain) near critical points of f where the tangent is undefined.
ArcClass classify_rv(const MfaModel& f, const Vec2& x, double class_tolerance = 1e-9);

// Splits a labelled graph into arcs between non-valence-2 vertices and label
// changes; each arc takes the majority label of its vertices.
std::vector<Arc> build_arcs(const TopoGraph& g);

}  // namespace mfatopo
