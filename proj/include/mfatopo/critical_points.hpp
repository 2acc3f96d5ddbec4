#pragma once

#include "mfatopo/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mfatopo {

enum class CriticalKind { Minimum, Maximum, Saddle, Degenerate };

const char* to_string(CriticalKind kind);

struct CriticalPoint {
    Vec2 position = Vec2::Zero();
    double value = 0.0;
    CriticalKind kind = CriticalKind::Degenerate;
};

struct NewtonConfig {
    int max_iterations = 100;
    double grad_tol = 1e-10;
    // Points closer than this are merged. <= 0 selects a quarter span length.
    double dedup_cell = 0.0;
    double degeneracy_tol = 1e-12;  // on |det H|
    // Seeds per span per dimension. <= 0 selects degree + 3.
    int seeds_per_dim = 0;
    int threads = 1;
};

// Spans that may contain a critical point: a span is dropped when, in some
// dimension, all of its local first-derivative control points share a strict sign.
std::vector<SpanIndex> filter_spans(const MfaModel& model);

CriticalKind classify(const ScalarField& field, const Vec2& x, double degeneracy_tol = 1e-12);

// Newton iteration confined to `span`. Empty on divergence, on leaving the span,
// or on a singular Hessian before convergence.
std::optional<CriticalPoint> newton_refine(const ScalarField& field, const Vec2& x0, const SpanIndex& span,
                                           const NewtonConfig& cfg);

struct CriticalPointSet {
    std::vector<CriticalPoint> points;  // lexicographic by position
    std::vector<std::string> warnings;
    std::size_t spans_processed = 0;
};

// B-spline fields are filtered first; derived fields process every span.
CriticalPointSet extract_critical_points(const ScalarField& field, const NewtonConfig& cfg = {});

void write_critical_points_csv(const std::vector<CriticalPoint>& points, const std::string& path);

}  // namespace mfatopo
