#pragma once

#include "mfatopo/critical_points.hpp"
#include "mfatopo/field.hpp"
#include "mfatopo/graph.hpp"
#include "mfatopo/spatial_hash.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mfatopo {

struct TraceConfig {
    double step = 0.0;      // s, physical units
    double epsilon = 1e-10;  // accuracy threshold on |field - a|
    double gamma = 0.0;     // connection threshold
    int seeds_per_dim = 0;  // initial points per span per dimension
    int max_descent_iterations = 100;  // c_max
    double min_grad = 1e-12;
    int threads = 1;

    // s = l / step_divisor, gamma = gamma_factor * s, seeds = degree + 3.
    static TraceConfig defaults(const ScalarField& field, double step_divisor = 4.0, double gamma_factor = 2.0);
    // Throws Error(Usage) when 0 < s <= l/2, eps > 0, gamma >= s do not hold.
    void validate(const SpanGrid& spans) const;
};

enum class StopReason { Closed, Boundary, NearCritical, StepCap, CorrectionFailed };

const char* to_string(StopReason r);

struct Trajectory {
    std::vector<Vec2> points;
    bool closed = false;
    int span = 0;  // linear span index
    StopReason front = StopReason::Boundary;  // how the first point was reached
    StopReason back = StopReason::Boundary;   // how the last point was reached
};

// Unit contour tangent (-f_x2, f_x1) / |grad f|; empty when |grad f| <= min_grad.
std::optional<Vec2> contour_tangent(const Vec2& grad, double min_grad);

// Normalized gradient descent on f - a from seeds_per_dim^2 span seeds.
// A root whose residual cannot drop below eps only because positions are
// quantized by double precision is kept and counted in floor_count.
std::vector<Vec2> find_starting_points(const ScalarField& field, double a, const SpanIndex& span,
                                       const TraceConfig& cfg, std::size_t* floor_count = nullptr);

// One classic RK4 step along direction * tangent; empty if any stage is near-critical.
std::optional<Vec2> rk4_step(const ScalarField& field, const Vec2& x, double s, int direction, double min_grad);

// Normalized gradient descent back onto the level set. Empty when it does not
// reach |f - a| <= eps within c_max iterations or drifts farther than max_shift,
// unless the best residual is at the double-precision floor (then at_floor).
std::optional<Vec2> correct(const ScalarField& field, double a, const Vec2& x, const TraceConfig& cfg,
                            double max_shift, bool* at_floor = nullptr);

// With `stops`, a trace also ends once it steps to within s of one of the
// stored points while approaching it.
Trajectory trace_trajectory(const ScalarField& field, double a, const Vec2& start, const SpanIndex& span,
                            const TraceConfig& cfg, const SpatialHash* stops = nullptr);

// Drops segments of later trajectories that correspond to accepted ones.
// Input trajectories must belong to one span.
std::vector<Trajectory> remove_duplicates(std::vector<Trajectory> trajectories, const TraceConfig& cfg);

// Drops trajectories whose every point lies within s of interior points of
// trajectories from other spans (a step there cut across a span corner or a
// shallow bulge). Shorter trajectories are examined first.
std::vector<Trajectory> remove_cross_span_duplicates(std::vector<Trajectory> trajectories, const TraceConfig& cfg);

// Graph of trajectory points plus the supplied critical points, with the
// connection rules applied in order: criticals, across spans, within a span.
TopoGraph connect(const std::vector<Trajectory>& trajectories, const std::vector<CriticalPoint>& criticals,
                  const ScalarField& field, double a, const TraceConfig& cfg);

struct TraceStats {
    std::size_t spans = 0;
    std::size_t starting_points = 0;
    std::size_t raw_trajectories = 0;
    std::size_t trajectories = 0;
    std::size_t step_cap_hits = 0;
    std::size_t correction_failures = 0;
    std::size_t floor_points = 0;  // vertices with eps < |f - a| <= rounding floor
};

struct LevelSetResult {
    TopoGraph graph;
    TraceStats stats;
    std::vector<std::string> warnings;
};

// Full pipeline: seed, trace and deduplicate per span (in parallel), then
// connect. `criticals` are inserted as-is. Throws Error(Degenerate) when the
// field equals `a` within eps at every seed.
LevelSetResult trace_level_set(const ScalarField& field, double a, const std::vector<CriticalPoint>& criticals,
                               const TraceConfig& cfg);

}  // namespace mfatopo
