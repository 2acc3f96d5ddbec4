#include "mfatopo/tracer.hpp"

#include "mfatopo/parallel.hpp"
#include "mfatopo/spatial_hash.hpp"

#include <algorithm>
#include <set>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace mfatopo {

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Closed: return "closed";
        case StopReason::Boundary: return "boundary";
        case StopReason::NearCritical: return "near-critical";
        case StopReason::StepCap: return "step-cap";
        case StopReason::CorrectionFailed: return "correction-failed";
    }
    return "boundary";
}

TraceConfig TraceConfig::defaults(const ScalarField& field, double step_divisor, double gamma_factor) {
    TraceConfig cfg;
    cfg.step = field.spans().span_length() / step_divisor;
    cfg.gamma = gamma_factor * cfg.step;
    cfg.seeds_per_dim = field.degree() + 3;
    return cfg;
}

void TraceConfig::validate(const SpanGrid& spans) const {
    const double l = spans.span_length();
    std::ostringstream os;
    if (!(step > 0.0) || step > 0.5 * l * (1.0 + 1e-12))
        os << "step size must satisfy 0 < s <= l/2 (s=" << step << ", l=" << l << ")";
    else if (!(epsilon > 0.0))
        os << "epsilon must be positive";
    else if (!(gamma >= step * (1.0 - 1e-12)))
        os << "connection threshold gamma must be >= s";
    else if (seeds_per_dim < 1)
        os << "seeds_per_dim must be >= 1";
    else if (max_descent_iterations < 1)
        os << "max_descent_iterations must be >= 1";
    else if (threads < 0)
        os << "threads must be >= 0";
    if (!os.str().empty()) throw Error(ErrorKind::Usage, os.str());
}

std::optional<Vec2> contour_tangent(const Vec2& grad, double min_grad) {
    const double n = grad.norm();
    if (!(n > min_grad)) return std::nullopt;
    return Vec2{-grad[1] / n, grad[0] / n};
}

namespace {

double rounding_floor(const Vec2& y, double value, double grad_norm) {
    auto ulp = [](double v) {
        v = std::abs(v);
        return std::nextafter(v, std::numeric_limits<double>::infinity()) - v;
    };
    return 4.0 * (grad_norm * std::max(ulp(y[0]), ulp(y[1])) + ulp(value));
}

double inside_tol(const SpanIndex& span) { return 1e-12 * std::max(span.bounds.width(0), span.bounds.width(1)); }

}  // namespace

std::vector<Vec2> find_starting_points(const ScalarField& field, double a, const SpanIndex& span,
                                       const TraceConfig& cfg, std::size_t* floor_count) {
    const Box& box = span.bounds;
    const double tol = inside_tol(span);
    std::vector<Vec2> roots;
    for (const Vec2& seed : uniform_seeds(box, cfg.seeds_per_dim)) {
        Vec2 x = seed;
        int exits = 0;
        bool found = false;
        Vec2 best = x;
        double best_fa = std::numeric_limits<double>::infinity(), floor = 0.0;
        for (int it = 0; it <= cfg.max_descent_iterations; ++it) {
            const FieldSample s = field.eval(x, 1);
            const double fa = s.value - a;
            if (std::abs(fa) <= cfg.epsilon) {
                found = true;
                break;
            }
            const double g2 = s.grad.squaredNorm();
            if (std::abs(fa) < best_fa && box.contains(x, tol)) {
                best_fa = std::abs(fa);
                best = x;
                floor = rounding_floor(x, s.value, std::sqrt(g2));
            }
            if (it == cfg.max_descent_iterations) break;
            if (!(std::sqrt(g2) > cfg.min_grad) || !std::isfinite(g2)) break;
            // x - alpha * grad/|grad| with alpha = fa/|grad|
            Vec2 next = x - (fa / g2) * s.grad;
            if (!box.contains(next, tol)) {
                if (++exits >= 2) break;
                next = box.clamp(next);
            } else {
                exits = 0;
            }
            x = next;
        }
        if (!found && best_fa <= floor) {
            x = best;
            found = true;
            if (floor_count) ++*floor_count;
        }
        if (!found || !box.contains(x, tol)) continue;
        bool near = false;
        for (const Vec2& r : roots)
            if ((r - x).norm() < cfg.step) {
                near = true;
                break;
            }
        if (!near) roots.push_back(x);
    }
    return roots;
}

std::optional<Vec2> rk4_step(const ScalarField& field, const Vec2& x, double s, int direction, double min_grad) {
    const double dir = direction >= 0 ? 1.0 : -1.0;
    auto m = [&](const Vec2& p) -> std::optional<Vec2> {
        auto t = contour_tangent(field.eval(p, 1).grad, min_grad);
        if (!t) return std::nullopt;
        return Vec2(dir * *t);
    };
    auto k1 = m(x);
    if (!k1) return std::nullopt;
    auto k2 = m(x + 0.5 * s * *k1);
    if (!k2) return std::nullopt;
    auto k3 = m(x + 0.5 * s * *k2);
    if (!k3) return std::nullopt;
    auto k4 = m(x + s * *k3);
    if (!k4) return std::nullopt;
    return Vec2(x + (s / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4));
}

std::optional<Vec2> correct(const ScalarField& field, double a, const Vec2& x, const TraceConfig& cfg,
                            double max_shift, bool* at_floor) {
    if (at_floor) *at_floor = false;
    Vec2 y = x;
    Vec2 best = x;
    double best_fa = std::numeric_limits<double>::infinity();
    double floor = 0.0;
    for (int it = 0; it <= cfg.max_descent_iterations; ++it) {
        const FieldSample s = field.eval(y, 1);
        const double fa = s.value - a;
        if (std::abs(fa) <= cfg.epsilon) return y;
        const double g = s.grad.norm();
        if (std::abs(fa) < best_fa) {
            best_fa = std::abs(fa);
            best = y;
            floor = rounding_floor(y, s.value, g);
        }
        if (it == cfg.max_descent_iterations) break;
        if (!(g > cfg.min_grad) || !std::isfinite(g)) break;
        y -= (fa / (g * g)) * s.grad;
        if ((y - x).norm() > max_shift) break;
    }
    // residual already at the resolution of double-precision positions
    if (best_fa <= floor && (best - x).norm() <= max_shift) {
        if (at_floor) *at_floor = true;
        return best;
    }
    return std::nullopt;
}

namespace {

struct DirTrace {
    std::vector<Vec2> points;  // excluding the start
    StopReason stop = StopReason::Boundary;
    bool closed = false;
};

// Distance to the nearest stop point within s, or infinity.
double nearest_stop(const SpatialHash* stops, const Vec2& x, double s) {
    double best = std::numeric_limits<double>::infinity();
    if (stops) stops->query(x, s, [&](std::size_t, double d) { best = std::min(best, d); });
    return best;
}

DirTrace trace_direction(const ScalarField& field, double a, const Vec2& start, const SpanIndex& span,
                         const TraceConfig& cfg, int direction, const SpatialHash* stops) {
    DirTrace out;
    const double s = cfg.step;
    const double tol = inside_tol(span);
    const long cap = static_cast<long>(std::ceil(10.0 * span.bounds.perimeter() / s));

    auto boundary_step = [&](const Vec2& x) {
        // shorten the step once so the last point stays close to the span edge
        if (auto z = rk4_step(field, x, 0.5 * s, direction, cfg.min_grad)) {
            auto zc = correct(field, a, *z, cfg, s);
            if (zc && span.bounds.contains(*zc, tol) && (*zc - x).norm() >= 0.25 * s) out.points.push_back(*zc);
        }
        out.stop = StopReason::Boundary;
    };

    Vec2 x = start;
    for (long steps = 0;; ++steps) {
        if (steps >= cap) {
            out.stop = StopReason::StepCap;
            return out;
        }
        auto y = rk4_step(field, x, s, direction, cfg.min_grad);
        if (!y || (*y - x).norm() < 0.5 * s) {
            out.stop = StopReason::NearCritical;
            return out;
        }
        if (!span.bounds.contains(*y, tol)) {
            boundary_step(x);
            return out;
        }
        auto yc = correct(field, a, *y, cfg, s);
        if (!yc) {
            out.stop = StopReason::CorrectionFailed;
            return out;
        }
        if (!span.bounds.contains(*yc, tol)) {
            boundary_step(x);
            return out;
        }
        out.points.push_back(*yc);
        // arriving within s of a known critical point ends the trace there
        const double d_new = nearest_stop(stops, *yc, s);
        if (d_new < s && d_new < nearest_stop(stops, x, s)) {
            out.stop = StopReason::NearCritical;
            return out;
        }
        x = *yc;
        if (direction > 0 && out.points.size() >= 3 && (x - start).norm() < s) {
            out.closed = true;
            out.stop = StopReason::Closed;
            return out;
        }
    }
}

}  // namespace

Trajectory trace_trajectory(const ScalarField& field, double a, const Vec2& start, const SpanIndex& span,
                            const TraceConfig& cfg, const SpatialHash* stops) {
    Trajectory t;
    t.span = field.spans().linear(span.i, span.j);
    DirTrace fwd = trace_direction(field, a, start, span, cfg, +1, stops);
    if (fwd.closed) {
        t.closed = true;
        t.front = t.back = StopReason::Closed;
        t.points.reserve(fwd.points.size() + 1);
        t.points.push_back(start);
        t.points.insert(t.points.end(), fwd.points.begin(), fwd.points.end());
        return t;
    }
    DirTrace bwd = trace_direction(field, a, start, span, cfg, -1, stops);
    t.points.reserve(fwd.points.size() + bwd.points.size() + 1);
    t.points.assign(bwd.points.rbegin(), bwd.points.rend());
    t.points.push_back(start);
    t.points.insert(t.points.end(), fwd.points.begin(), fwd.points.end());
    t.front = bwd.stop;
    t.back = fwd.stop;
    return t;
}

namespace {

// Distance from p to the nearest point of t.
double nearest_point_distance(const Vec2& p, const Trajectory& t) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& q : t.points) best = std::min(best, (p - q).squaredNorm());
    return std::sqrt(best);
}

}  // namespace

std::vector<Trajectory> remove_duplicates(std::vector<Trajectory> trajectories, const TraceConfig& cfg) {
    // closed loops first, then longer traces, so that later ones are the
    // candidates for trimming
    std::stable_sort(trajectories.begin(), trajectories.end(), [](const Trajectory& x, const Trajectory& y) {
        if (x.closed != y.closed) return x.closed;
        return x.points.size() > y.points.size();
    });
    // points closer than s to an accepted point are corresponding
    const double tau = cfg.step;
    std::vector<Trajectory> kept;
    for (auto& t : trajectories) {
        const std::size_t n = t.points.size();
        std::vector<char> covered(n, 0);
        std::size_t n_cov = 0;
        for (std::size_t k = 0; k < n; ++k) {
            for (const auto& acc : kept) {
                if (nearest_point_distance(t.points[k], acc) < tau) {
                    covered[k] = 1;
                    ++n_cov;
                    break;
                }
            }
        }
        if (n_cov == 0) {
            kept.push_back(std::move(t));
            continue;
        }
        if (n_cov == n) continue;

        // keep each maximal uncovered run, widened by one covered neighbour on
        // each side so the remainder still reaches the accepted trajectory
        auto emit = [&](std::vector<Vec2> pts, StopReason front, StopReason back) {
            Trajectory piece;
            piece.points = std::move(pts);
            piece.span = t.span;
            piece.front = front;
            piece.back = back;
            kept.push_back(std::move(piece));
        };
        if (t.closed) {
            // rotate so that index 0 is covered; runs are then contiguous
            std::size_t first_cov = 0;
            while (!covered[first_cov]) ++first_cov;
            std::size_t k = 0;
            while (k < n) {
                std::size_t idx = (first_cov + k) % n;
                if (covered[idx]) {
                    ++k;
                    continue;
                }
                std::size_t run_start = k;
                while (k < n && !covered[(first_cov + k) % n]) ++k;
                std::vector<Vec2> pts;
                for (std::size_t r = run_start - 1; r <= k; ++r) pts.push_back(t.points[(first_cov + r) % n]);
                emit(std::move(pts), StopReason::NearCritical, StopReason::NearCritical);
            }
        } else {
            std::size_t k = 0;
            while (k < n) {
                if (covered[k]) {
                    ++k;
                    continue;
                }
                std::size_t run_start = k;
                while (k < n && !covered[k]) ++k;
                const std::size_t lo = run_start > 0 ? run_start - 1 : 0;
                const std::size_t hi = k < n ? k : n - 1;
                std::vector<Vec2> pts(t.points.begin() + static_cast<long>(lo), t.points.begin() + static_cast<long>(hi) + 1);
                emit(std::move(pts), run_start > 0 ? StopReason::NearCritical : t.front,
                     k < n ? StopReason::NearCritical : t.back);
            }
        }
    }
    return kept;
}

namespace {

// Every point of a lies within s of some point of b.
bool within(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double s) {
    for (const Vec2& p : a) {
        bool near = false;
        for (const Vec2& q : b)
            if ((p - q).norm() < s) {
                near = true;
                break;
            }
        if (!near) return false;
    }
    return true;
}

}  // namespace

std::vector<Trajectory> remove_cross_span_duplicates(std::vector<Trajectory> trajectories, const TraceConfig& cfg) {
    const double s = cfg.step;
    SpatialHash interior(s), every(s);
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        const auto& q = trajectories[t].points;
        const std::size_t lo = trajectories[t].closed ? 0 : 1;
        const std::size_t hi = trajectories[t].closed ? q.size() : (q.size() >= 1 ? q.size() - 1 : 0);
        for (std::size_t k = lo; k < hi; ++k) interior.insert(q[k], t);
        for (const Vec2& p : q) every.insert(p, t);
    }
    std::vector<std::size_t> order(trajectories.size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return trajectories[x].points.size() < trajectories[y].points.size();
    });
    std::vector<char> alive(trajectories.size(), 1);
    for (std::size_t t : order) {
        const auto& tr = trajectories[t];
        bool all_covered = !tr.points.empty();
        for (const Vec2& p : tr.points) {
            bool covered = false;
            interior.query(p, s, [&](std::size_t o, double d) {
                if (d < s && alive[o] && trajectories[o].span != tr.span) covered = true;
            });
            if (!covered) {
                all_covered = false;
                break;
            }
        }
        if (all_covered) {
            alive[t] = 0;
            continue;
        }
        if (tr.points.empty()) continue;
        // the same curve traced from both sides of a shared span edge
        std::vector<std::size_t> cands;
        every.query(tr.points.front(), s, [&](std::size_t o, double d) {
            if (d < s && o != t && alive[o] && trajectories[o].span != tr.span) cands.push_back(o);
        });
        for (std::size_t o : cands)
            if (within(tr.points, trajectories[o].points, s) && within(trajectories[o].points, tr.points, s)) {
                alive[t] = 0;
                break;
            }
    }
    std::vector<Trajectory> out;
    for (std::size_t t = 0; t < trajectories.size(); ++t)
        if (alive[t]) out.push_back(std::move(trajectories[t]));
    return out;
}

TopoGraph connect(const std::vector<Trajectory>& trajectories, const std::vector<CriticalPoint>& criticals,
                  const ScalarField& field, double a, const TraceConfig& cfg) {
    (void)a;
    TopoGraph g;
    const SpanGrid& grid = field.spans();

    struct Endpoint {
        int vertex;
        int traj;
        int span;
        int capacity;
    };
    std::vector<Endpoint> ends;

    for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
        const auto& t = trajectories[ti];
        if (t.points.empty()) continue;
        const int first = static_cast<int>(g.num_vertices());
        for (const Vec2& p : t.points) g.add_vertex({p, field.value(p), VertexKind::Regular});
        const int last = static_cast<int>(g.num_vertices()) - 1;
        for (int v = first; v < last; ++v) g.add_edge(v, v + 1);
        if (t.closed && last - first >= 2) {
            g.add_edge(last, first);
        } else if (first == last) {
            // a lone point is both ends of its trajectory
            ends.push_back({first, static_cast<int>(ti), t.span, 1});
            ends.push_back({first, static_cast<int>(ti), t.span, 1});
        } else if (!t.closed) {
            ends.push_back({first, static_cast<int>(ti), t.span, 1});
            ends.push_back({last, static_cast<int>(ti), t.span, 1});
        }
    }

    const int first_crit = static_cast<int>(g.num_vertices());
    for (const auto& cp : criticals) g.add_vertex({cp.position, field.value(cp.position), to_vertex_kind(cp.kind)});

    const double gamma = cfg.gamma;
    auto pos = [&](int v) -> const Vec2& { return g.vertices()[v].position; };

    struct Candidate {
        double d;
        int a;  // endpoint index
        int b;  // endpoint index, or vertex id for criticals
    };
    auto by_distance = [&](const Candidate& x, const Candidate& y) {
        if (x.d != y.d) return x.d < y.d;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    };

    // 1-2: endpoints to nearby critical points (<= gamma); criticals take any valence
    if (!criticals.empty()) {
        SpatialHash crit_hash(gamma);
        for (std::size_t c = 0; c < criticals.size(); ++c) crit_hash.insert(criticals[c].position, first_crit + c);
        SpatialHash near_ends(gamma);
        for (std::size_t e = 0; e < ends.size(); ++e) near_ends.insert(pos(ends[e].vertex), e);
        std::vector<Candidate> cands;
        for (std::size_t e = 0; e < ends.size(); ++e) {
            Candidate best{std::numeric_limits<double>::infinity(), static_cast<int>(e), -1};
            crit_hash.query(pos(ends[e].vertex), gamma, [&](std::size_t v, double d) {
                if (d < best.d || (d == best.d && static_cast<int>(v) < best.b)) best = {d, static_cast<int>(e), static_cast<int>(v)};
            });
            if (best.b < 0) continue;
            // an end farther than s whose path to the critical point passes
            // another trajectory's end is continued by that trajectory instead
            bool shadowed = false;
            if (best.d > cfg.step) near_ends.query(pos(ends[e].vertex), best.d, [&](std::size_t o, double d) {
                if (ends[o].traj == ends[e].traj || !(d < best.d)) return;
                if (d + (pos(ends[o].vertex) - pos(best.b)).norm() <= 1.25 * best.d) shadowed = true;
            });
            if (!shadowed) cands.push_back(best);
        }
        std::sort(cands.begin(), cands.end(), by_distance);
        // only the nearer end of a trajectory may join a given critical point
        std::set<std::pair<int, int>> joined;
        for (const auto& c : cands) {
            Endpoint& e = ends[c.a];
            if (e.capacity <= 0 || joined.count({e.traj, c.b})) continue;
            if (g.add_edge(e.vertex, c.b)) {
                --e.capacity;
                joined.insert({e.traj, c.b});
            }
        }
    }

    SpatialHash end_hash(gamma);
    for (std::size_t e = 0; e < ends.size(); ++e) end_hash.insert(pos(ends[e].vertex), e);

    // 1 = spans share an edge, 2 = spans share only a corner
    auto span_adjacency = [&](int s1, int s2) {
        const auto a1 = grid.span(s1), a2 = grid.span(s2);
        const int di = std::abs(a1.i - a2.i), dj = std::abs(a1.j - a2.j);
        if (di > 1 || dj > 1 || di + dj == 0) return 0;
        return di + dj;
    };

    auto match = [&](auto eligible, bool strict) {
        std::vector<Candidate> cands;
        for (std::size_t e = 0; e < ends.size(); ++e) {
            end_hash.query(pos(ends[e].vertex), gamma, [&](std::size_t o, double d) {
                if (o <= e) return;
                if (strict && !(d < gamma)) return;
                if (eligible(ends[e], ends[o])) cands.push_back({d, static_cast<int>(e), static_cast<int>(o)});
            });
        }
        std::sort(cands.begin(), cands.end(), by_distance);
        std::vector<char> used(ends.size(), 0);
        for (const auto& c : cands) {
            Endpoint& x = ends[c.a];
            Endpoint& y = ends[c.b];
            if (used[c.a] || used[c.b] || x.capacity <= 0 || y.capacity <= 0) continue;
            if (!g.add_edge(x.vertex, y.vertex)) continue;
            --x.capacity;
            --y.capacity;
            used[c.a] = used[c.b] = 1;
        }
    };

    // 3: across adjacent spans (<= gamma)
    // edge neighbours first so a short piece clipping a span corner is not bypassed
    match([&](const Endpoint& x, const Endpoint& y) { return span_adjacency(x.span, y.span) == 1; }, false);
    match([&](const Endpoint& x, const Endpoint& y) { return span_adjacency(x.span, y.span) == 2; }, false);
    // 4: within a span (< gamma), between different trajectories
    match([&](const Endpoint& x, const Endpoint& y) { return x.span == y.span && x.traj != y.traj; }, true);

    return g;
}

LevelSetResult trace_level_set(const ScalarField& field, double a, const std::vector<CriticalPoint>& criticals,
                               const TraceConfig& cfg) {
    const SpanGrid& grid = field.spans();
    cfg.validate(grid);

    struct SpanWork {
        std::vector<Trajectory> trajectories;
        std::size_t starts = 0;
        std::size_t raw = 0;
        double max_residual = 0.0;  // max |f - a| over seeds
    };
    SpatialHash stops(cfg.step);
    for (std::size_t c = 0; c < criticals.size(); ++c) stops.insert(criticals[c].position, c);
    std::vector<SpanWork> work(static_cast<std::size_t>(grid.size()));
    parallel_for_each(work.size(), cfg.threads, [&](std::size_t k) {
        const SpanIndex span = grid.span(static_cast<int>(k));
        SpanWork& w = work[k];
        for (const Vec2& seed : uniform_seeds(span.bounds, cfg.seeds_per_dim))
            w.max_residual = std::max(w.max_residual, std::abs(field.value(seed) - a));
        const auto starts = find_starting_points(field, a, span, cfg);
        w.starts = starts.size();
        std::vector<Trajectory> raw;
        raw.reserve(starts.size());
        for (const Vec2& s : starts) {
            // from this close a trace can cut across the crossing at a critical point
            if (nearest_stop(&stops, s, cfg.step) < cfg.step) continue;
            raw.push_back(trace_trajectory(field, a, s, span, cfg, &stops));
        }
        w.raw = raw.size();
        w.trajectories = remove_duplicates(std::move(raw), cfg);
    });

    LevelSetResult res;
    double max_residual = 0.0;
    std::vector<Trajectory> all;
    for (auto& w : work) {
        max_residual = std::max(max_residual, w.max_residual);
        res.stats.starting_points += w.starts;
        res.stats.raw_trajectories += w.raw;
        for (auto& t : w.trajectories) {
            if (t.front == StopReason::StepCap || t.back == StopReason::StepCap) ++res.stats.step_cap_hits;
            if (t.front == StopReason::CorrectionFailed || t.back == StopReason::CorrectionFailed)
                ++res.stats.correction_failures;
            all.push_back(std::move(t));
        }
    }
    all = remove_cross_span_duplicates(std::move(all), cfg);
    if (max_residual < cfg.epsilon)
        throw Error(ErrorKind::Degenerate, "field equals the isovalue everywhere: level set is not a curve");
    res.stats.spans = work.size();
    res.stats.trajectories = all.size();
    if (res.stats.step_cap_hits)
        res.warnings.push_back(std::to_string(res.stats.step_cap_hits) + " trajectory end(s) hit the step cap");
    if (res.stats.correction_failures)
        res.warnings.push_back(std::to_string(res.stats.correction_failures) +
                               " trajectory end(s) stopped on a failed correction");
    res.graph = connect(all, criticals, field, a, cfg);
    res.graph.isovalue = a;
    for (const auto& v : res.graph.vertices())
        if (v.kind == VertexKind::Regular && std::abs(v.value - a) > cfg.epsilon) ++res.stats.floor_points;
    if (res.stats.floor_points)
        res.warnings.push_back(std::to_string(res.stats.floor_points) +
                               " point(s) kept at the double-precision floor above epsilon");
    return res;
}

}  // namespace mfatopo
