#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfatopo {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Error categories. The C API maps each one onto a status code.
enum class ErrorKind {
    Domain,      // query outside the model domain
    Order,       // derivative order unsupported by the degree
    Fit,         // singular or underdetermined least-squares system
    Parse,       // malformed input file
    Validation,  // well-formed input violating an invariant
    Io,
    Degenerate,  // derived field vanishes identically
    Usage,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};

    double width(int dim) const { return hi[dim] - lo[dim]; }
    bool contains(const Vec2& x, double tol = 0.0) const {
        return x[0] >= lo[0] - tol && x[0] <= hi[0] + tol && x[1] >= lo[1] - tol &&
               x[1] <= hi[1] + tol;
    }
    Vec2 clamp(const Vec2& x) const {
        return {std::clamp(x[0], lo[0], hi[0]), std::clamp(x[1], lo[1], hi[1])};
    }
    double perimeter() const { return 2.0 * (width(0) + width(1)); }
};

struct SpanIndex {
    int i = 0;  // along x1 / u
    int j = 0;  // along x2 / v
    Box bounds;

    friend bool operator==(const SpanIndex& a, const SpanIndex& b) { return a.i == b.i && a.j == b.j; }
};

// Uniform rectangular partition of a physical domain into spans. Every field
// the tracer consumes exposes one of these.
class SpanGrid {
public:
    SpanGrid() = default;
    SpanGrid(Box domain, int nu, int nv);

    const Box& domain() const { return domain_; }
    int count(int dim) const { return dim == 0 ? nu_ : nv_; }
    int size() const { return nu_ * nv_; }
    double span_width(int dim) const { return domain_.width(dim) / count(dim); }
    // Span length used to scale the tracing step: the shorter side.
    double span_length() const { return std::min(span_width(0), span_width(1)); }

    Box bounds(int i, int j) const;
    SpanIndex span(int i, int j) const { return {i, j, bounds(i, j)}; }
    SpanIndex span(int linear) const { return span(linear / nv_, linear % nv_); }
    int linear(int i, int j) const { return i * nv_ + j; }

    // Span containing x. Knot ties go to the lower span except at the domain maximum.
    SpanIndex locate(const Vec2& x) const;
    // Same, without the domain check; points outside are assigned to the nearest span.
    std::pair<int, int> locate_clamped(const Vec2& x) const;

private:
    int locate_dim(double x, int dim) const;

    Box domain_;
    int nu_ = 1;
    int nv_ = 1;
};

inline bool lex_less(const Vec2& a, const Vec2& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
}

}  // namespace mfatopo
