#include "doctest.h"
#include "support.hpp"

#include "mfatopo/critical_points.hpp"
#include "mfatopo/synthetic.hpp"

#include <set>

using namespace mfatopo;
using namespace testsupport;

namespace {

MfaModel quadratic(double a, double b, Box dom = {{-1, -1}, {1, 1}}) {
    return model_from([=](const Vec2& x) { return a * x[0] * x[0] + b * x[1] * x[1]; }, dom, 4, 4);
}

bool in_span(const SpanIndex& s, const std::vector<SpanIndex>& kept) {
    for (const auto& k : kept)
        if (k == s) return true;
    return false;
}

// Every oracle point has a returned point of the same kind within tol.
void check_complete(const std::vector<CriticalPoint>& found, const std::vector<DenseCritical>& oracle, double tol) {
    for (const auto& o : oracle) {
        double best = 1e300;
        CriticalKind kind = CriticalKind::Degenerate;
        for (const auto& c : found) {
            const double d = (c.position - o.position).norm();
            if (d < best) {
                best = d;
                kind = c.kind;
            }
        }
        INFO("oracle point (" << o.position[0] << ", " << o.position[1] << ") " << to_string(o.kind));
        CHECK(best <= tol);
        CHECK(kind == o.kind);
    }
}

}  // namespace

TEST_CASE("classify by Hessian signs") {
    const auto mn = quadratic(1, 1), mx = quadratic(-1, -1), sd = quadratic(1, -1);
    CHECK(classify(ModelField(mn), {0, 0}) == CriticalKind::Minimum);
    CHECK(classify(ModelField(mx), {0, 0}) == CriticalKind::Maximum);
    CHECK(classify(ModelField(sd), {0, 0}) == CriticalKind::Saddle);
    const auto flat = quadratic(0, 0);
    CHECK(classify(ModelField(flat), {0.2, 0.1}) == CriticalKind::Degenerate);
}

TEST_CASE("newton_refine on quadratics") {
    SUBCASE("minimum") {
        const auto m = quadratic(1, 1);
        ModelField f(m);
        const Vec2 x0(0.3, -0.2);
        // the origin is a corner of x0's span
        const auto c = newton_refine(f, x0, m.span_of(x0), NewtonConfig{});
        REQUIRE(c.has_value());
        CHECK(c->position.norm() < 1e-12);
        CHECK(c->kind == CriticalKind::Minimum);
    }
    SUBCASE("saddle") {
        const auto m = quadratic(1, -1);
        ModelField f(m);
        const auto c = newton_refine(f, {0.05, -0.03}, m.span_of({0.05, -0.03}), NewtonConfig{});
        REQUIRE(c.has_value());
        CHECK(c->position.norm() < 1e-12);
        CHECK(c->kind == CriticalKind::Saddle);
    }
    SUBCASE("leaving the span fails") {
        const auto m = quadratic(1, 1);
        ModelField f(m);
        const auto span = m.span_of({0.75, 0.75});
        CHECK_FALSE(newton_refine(f, {0.75, 0.75}, span, NewtonConfig{}).has_value());
    }
}

TEST_CASE("filter_spans") {
    SUBCASE("monotone field keeps nothing") {
        const auto m = model_from([](const Vec2& x) { return x[0]; }, {{0, 0}, {1, 1}}, 3, 5);
        CHECK(filter_spans(m).empty());
    }
    SUBCASE("constant field keeps everything") {
        const auto m = model_from([](const Vec2&) { return 2.0; }, {{0, 0}, {1, 1}}, 3, 5);
        CHECK(filter_spans(m).size() == 25);
    }
    SUBCASE("sinc: retained spans cover every dense-scan critical point") {
        const auto m = fit_synthetic(Synthetic::Sinc);
        const auto kept = filter_spans(m);
        const auto oracle = dense_scan(ModelField(m), 1000, 1e-7);
        REQUIRE(oracle.size() > 50);
        for (const auto& o : oracle) CHECK(in_span(m.span_of(o.position), kept));
    }
}

TEST_CASE("extract_critical_points on simple fields") {
    SUBCASE("paraboloid has one minimum") {
        const auto m = quadratic(1, 1);
        const auto r = extract_critical_points(ModelField(m));
        REQUIRE(r.points.size() == 1);
        CHECK(r.points[0].position.norm() < 1e-10);
        CHECK(r.points[0].kind == CriticalKind::Minimum);
    }
    SUBCASE("constant field: no points and a warning") {
        const auto m = model_from([](const Vec2&) { return 2.0; }, {{0, 0}, {1, 1}}, 3, 3);
        const auto r = extract_critical_points(ModelField(m));
        CHECK(r.points.empty());
        CHECK_FALSE(r.warnings.empty());
    }
    SUBCASE("soundness") {
        const auto m = fit_synthetic(Synthetic::GaussianMixture);
        ModelField f(m);
        for (const auto& c : extract_critical_points(f).points) CHECK(f.eval(c.position, 1).grad.norm() < 1e-10);
    }
}

TEST_CASE("completeness against the dense scan on the synthetic models") {
    for (Synthetic s : all_synthetics()) {
        INFO("field " << to_string(s));
        const auto m = fit_synthetic(s);
        ModelField f(m);
        const auto found = extract_critical_points(f).points;
        const auto oracle = dense_scan(f, 1000, 1e-7 * m.domain().width(0));
        CHECK(!oracle.empty());
        check_complete(found, oracle, 1e-6);
        // filtration safety: nothing the scan finds sits in a discarded span
        const auto kept = filter_spans(m);
        for (const auto& o : oracle) CHECK(in_span(m.span_of(o.position), kept));
    }
}

TEST_CASE("gaussian mixture critical points") {
    const auto m = fit_synthetic(Synthetic::GaussianMixture);
    ModelField f(m);
    const auto found = extract_critical_points(f).points;
    const auto oracle = dense_scan(f, 1000, 1e-7);
    CHECK(found.size() == oracle.size());
    int maxima = 0, saddles = 0;
    for (const auto& c : found) {
        maxima += c.kind == CriticalKind::Maximum;
        saddles += c.kind == CriticalKind::Saddle;
    }
    CHECK(maxima == 3);
    CHECK(saddles == 2);
}

TEST_CASE("output is sorted and identical across thread counts") {
    const auto m = fit_synthetic(Synthetic::Sinc);
    ModelField f(m);
    NewtonConfig one, many;
    many.threads = 4;
    const auto a = extract_critical_points(f, one).points, b = extract_critical_points(f, many).points;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].position[0] == b[k].position[0]);
        CHECK(a[k].position[1] == b[k].position[1]);
        CHECK(a[k].kind == b[k].kind);
        if (k) CHECK(lex_less(a[k - 1].position, a[k].position));
    }
    // no two points closer than the merge distance
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t l = k + 1; l < a.size(); ++l) CHECK((a[k].position - a[l].position).norm() > 1e-6);
}
