#pragma once

#include "mfatopo/model.hpp"
#include "mfatopo/types.hpp"

#include <functional>
#include <vector>

namespace mfatopo {

struct FieldSample {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Mat2 hess = Mat2::Zero();
};

// Any scalar field over a span-partitioned rectangle that can report its value
// and derivatives at arbitrary points. The tracer and the critical point
// extractor consume fields only through this interface.
class ScalarField {
public:
    virtual ~ScalarField() = default;

    virtual const SpanGrid& spans() const = 0;
    // Effective per-dimension polynomial degree inside one span.
    virtual int degree() const = 0;
    // Highest derivative order eval() honours (1 = gradient, 2 = Hessian).
    virtual int max_order() const = 0;
    // Points slightly outside the domain are evaluated by extension.
    virtual FieldSample eval(const Vec2& x, int order) const = 0;

    // Non-null when the field is a plain B-spline, enabling span filtration.
    virtual const MfaModel* spline() const { return nullptr; }

    double value(const Vec2& x) const { return eval(x, 0).value; }
    const Box& domain() const { return spans().domain(); }
};

class ModelField final : public ScalarField {
public:
    explicit ModelField(const MfaModel& model) : model_(model) {}

    const SpanGrid& spans() const override { return model_.spans(); }
    int degree() const override { return model_.degree(); }
    int max_order() const override { return model_.degree() >= 2 ? 2 : 1; }
    FieldSample eval(const Vec2& x, int order) const override {
        const Derivs d = model_.derivs(x, order);
        return {d.value(), d.gradient(), d.hessian()};
    }
    const MfaModel* spline() const override { return &model_; }

private:
    const MfaModel& model_;
};

// Closed-form field, mainly for tests and analytic references.
class FunctionField final : public ScalarField {
public:
    using Fn = std::function<FieldSample(const Vec2&)>;

    FunctionField(Fn fn, SpanGrid spans, int degree, int max_order = 2)
        : fn_(std::move(fn)), spans_(std::move(spans)), degree_(degree), max_order_(max_order) {}

    const SpanGrid& spans() const override { return spans_; }
    int degree() const override { return degree_; }
    int max_order() const override { return max_order_; }
    FieldSample eval(const Vec2& x, int) const override { return fn_(x); }

private:
    Fn fn_;
    SpanGrid spans_;
    int degree_;
    int max_order_;
};

// per_dim x per_dim lattice over b, boundary rows and columns included.
inline std::vector<Vec2> uniform_seeds(const Box& b, int per_dim) {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(per_dim) * per_dim);
    for (int a = 0; a < per_dim; ++a)
        for (int c = 0; c < per_dim; ++c) {
            const double fa = per_dim > 1 ? static_cast<double>(a) / (per_dim - 1) : 0.5;
            const double fc = per_dim > 1 ? static_cast<double>(c) / (per_dim - 1) : 0.5;
            out.push_back({b.lo[0] + fa * b.width(0), b.lo[1] + fc * b.width(1)});
        }
    return out;
}

}  // namespace mfatopo
