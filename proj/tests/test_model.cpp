#include "doctest.h"
#include "support.hpp"

#include "mfatopo/bspline.hpp"
#include "mfatopo/model.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace mfatopo;
using namespace testsupport;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Usage;
}

GridData grid_of(const std::function<double(const Vec2&)>& fn, Box domain, int nx, int ny) {
    GridData g;
    g.nx = nx;
    g.ny = ny;
    g.domain = domain;
    g.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) g.at(i, j) = fn(g.position(i, j));
    return g;
}

double rms_against(const MfaModel& m, const GridData& g) {
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double e = m.value(g.position(i, j)) - g.at(i, j);
            s += e * e;
        }
    return std::sqrt(s / (g.nx * g.ny));
}

}  // namespace

TEST_CASE("basis values: partition of unity and zero-sum derivatives") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int p = 1; p <= 5; ++p) {
        const auto kv = KnotVector::uniform(p, 7);
        for (int trial = 0; trial < 200; ++trial) {
            const double u = trial == 0 ? 0.0 : trial == 1 ? 1.0 : u01(rng);
            const auto e = basis_values(kv, u, std::min(p, 3));
            REQUIRE(e.size() == static_cast<std::size_t>(p + 1));
            double s0 = 0.0, s1 = 0.0;
            for (const auto& b : e) {
                s0 += b.values[0];
                s1 += b.values[1];
            }
            CHECK(std::abs(s0 - 1.0) <= 1e-12);
            CHECK(std::abs(s1) <= 1e-10);
        }
    }
}

TEST_CASE("basis values match the recursive definition") {
    const auto kv = KnotVector::uniform(4, 6);
    for (double u : {0.5, 0.0, 1.0, 0.123, 0.8751}) {
        const auto e = basis_values(kv, u, 0);
        for (const auto& b : e) CHECK(b.values[0] == doctest::Approx(cox_de_boor(kv.knots(), b.index, 4, u)).epsilon(1e-13));
        double outside = 0.0;
        for (int j = 0; j < kv.num_ctrl(); ++j) {
            bool active = false;
            for (const auto& b : e) active |= b.index == j;
            if (!active) outside += std::abs(cox_de_boor(kv.knots(), j, 4, u));
        }
        CHECK(outside == 0.0);
    }
}

TEST_CASE("basis values reject bad arguments") {
    const auto kv = KnotVector::uniform(3, 4);
    CHECK(kind_of([&] { basis_values(kv, 1.5, 0); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { basis_values(kv, -0.1, 0); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { basis_values(kv, 0.5, 4); }) == ErrorKind::Order);
}

TEST_CASE("knot vector validation") {
    CHECK(kind_of([] { KnotVector(2, {0, 0, 0, 0.6, 0.4, 1, 1, 1}); }) == ErrorKind::Validation);
    CHECK(kind_of([] { KnotVector(2, {0, 0, 0.1, 0.5, 1, 1, 1}); }) == ErrorKind::Validation);
    const auto kv = KnotVector::uniform(4, 5);
    CHECK(kv.num_ctrl() == 9);
    CHECK(kv.num_spans() == 5);
    CHECK(kv.is_uniform());
}

TEST_CASE("constant model evaluates to its control value") {
    const auto ku = KnotVector::uniform(4, 3), kv = KnotVector::uniform(4, 5);
    const double c = 2.75;
    MfaModel m(ku, kv, std::vector<double>(static_cast<std::size_t>(ku.num_ctrl()) * kv.num_ctrl(), c), {{0, 0}, {2, 1}});
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) {
        const Vec2 x = random_point(rng, m.domain());
        CHECK(m.evaluate(x, 0, 0) == doctest::Approx(c).epsilon(1e-14));
        CHECK(std::abs(m.evaluate(x, 1, 0)) < 1e-12);
        CHECK(std::abs(m.evaluate(x, 0, 1)) < 1e-12);
    }
}

TEST_CASE("evaluate: domain and order errors") {
    std::mt19937_64 rng(3);
    const auto m = random_model(rng, 2, 3, 3);
    CHECK(kind_of([&] { m.evaluate({10.0, 0.0}, 0, 0); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { m.evaluate({0.0, 0.0}, 3, 0); }) == ErrorKind::Order);
    CHECK(kind_of([&] { m.evaluate({0.0, 0.0}, 2, 2); }) == ErrorKind::Order);
    CHECK_NOTHROW(m.evaluate({0.0, 0.0}, 1, 1));
}

TEST_CASE("derivatives of orders 1-3 match central differences") {
    std::mt19937_64 rng(4);
    const auto m = random_model(rng, 4, 5, 4);
    const double h = 1e-5;
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        const Vec2 x = random_point(rng, m.domain(), 0.01);
        for (int order = 1; order <= 3; ++order)
            for (int d1 = 0; d1 <= order; ++d1) {
                const int d2 = order - d1;
                // differentiate the order-below partial along a dimension it can still take
                const bool along1 = d1 > 0;
                const int b1 = along1 ? d1 - 1 : d1, b2 = along1 ? d2 : d2 - 1;
                const Vec2 e = along1 ? Vec2(h, 0) : Vec2(0, h);
                const double fd = (m.evaluate(x + e, b1, b2) - m.evaluate(x - e, b1, b2)) / (2 * h);
                const double an = m.evaluate(x, d1, d2);
                CHECK(rel_err(fd, an) < 1e-6);
                ++checked;
            }
    }
    CHECK(checked == 900);
}

TEST_CASE("first derivative matches finite differences of the value with step 1e-5") {
    std::mt19937_64 rng(5);
    const auto m = random_model(rng, 3, 4, 4);
    for (int k = 0; k < 100; ++k) {
        const Vec2 x = random_point(rng, m.domain(), 0.01);
        const double fd = (m.value(x + Vec2(1e-5, 0)) - m.value(x - Vec2(1e-5, 0))) / 2e-5;
        CHECK(rel_err(fd, m.evaluate(x, 1, 0)) < 1e-6);
    }
}

TEST_CASE("span boundary continuity up to order p-1") {
    std::mt19937_64 rng(6);
    const int p = 4;
    const auto m = random_model(rng, p, 4, 3, {{0, 0}, {4, 3}});
    const double tiny = 1e-12;
    for (int k = 1; k < 4; ++k) {
        const double xk = static_cast<double>(k);
        for (double y : {0.3, 1.7, 2.9}) {
            const auto left = m.derivs({xk - tiny, y}, 3), right = m.derivs({xk + tiny, y}, 3);
            for (int d = 0; d <= std::min(p - 1, 3); ++d)
                for (int b = 0; b + d <= 3; ++b) CHECK(std::abs(left(d, b) - right(d, b)) <= 1e-9 * std::max(1.0, std::abs(left(d, b))));
        }
    }
}

TEST_CASE("convex hull property within each span") {
    std::mt19937_64 rng(7);
    const int p = 3;
    const auto m = random_model(rng, p, 3, 3);
    for (int k = 0; k < 300; ++k) {
        const Vec2 x = random_point(rng, m.domain());
        const SpanIndex s = m.span_of(x);
        double lo = 1e300, hi = -1e300;
        for (int a = s.i; a <= s.i + p; ++a)
            for (int b = s.j; b <= s.j + p; ++b) {
                lo = std::min(lo, m.ctrl(a, b));
                hi = std::max(hi, m.ctrl(a, b));
            }
        const double v = m.value(x);
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("fit: constants are reproduced") {
    const Box dom{{-1, 0}, {1, 2}};
    const auto g = grid_of([](const Vec2&) { return 3.5; }, dom, 20, 20);
    FitReport rep;
    const auto m = fit(g, 4, 8, 9, &rep);
    for (double c : m.ctrl_values()) CHECK(std::abs(c - 3.5) <= 1e-9);
    CHECK(rep.rms_residual < 1e-10);
    CHECK(m.domain().lo == dom.lo);
    CHECK(m.domain().hi == dom.hi);
}

TEST_CASE("fit: polynomials of degree <= p are reproduced") {
    const Box dom{{-1, -1}, {2, 1}};
    SUBCASE("bilinear") {
        const auto g = grid_of([](const Vec2& x) { return 2 * x[0] + 3 * x[1] + 1; }, dom, 20, 20);
        CHECK(rms_against(fit(g, 4, 8, 8), g) < 1e-9);
    }
    SUBCASE("degree 4 per dimension") {
        const auto fn = [](const Vec2& x) {
            return std::pow(x[0], 4) * std::pow(x[1], 3) - 2 * x[0] * x[0] * x[1] + 0.5 * std::pow(x[1], 4) - x[0];
        };
        const auto g = grid_of(fn, dom, 33, 25);
        const auto m = fit(g, 4, 10, 9);
        CHECK(rms_against(m, g) < 1e-9);
        std::mt19937_64 rng(8);
        for (int k = 0; k < 50; ++k) {
            const Vec2 x = random_point(rng, dom);
            CHECK(std::abs(m.value(x) - fn(x)) < 1e-8);
        }
    }
}

TEST_CASE("fit: invalid requests") {
    const auto g = grid_of([](const Vec2& x) { return x[0]; }, {{0, 0}, {1, 1}}, 6, 6);
    CHECK(kind_of([&] { fit(g, 0, 4, 4); }) == ErrorKind::Usage);
    CHECK(kind_of([&] { fit(g, 4, 3, 6); }) == ErrorKind::Fit);
    CHECK(kind_of([&] { fit(g, 2, 8, 5); }) == ErrorKind::Fit);
}

TEST_CASE("span_of: tie-break rules and containment") {
    std::mt19937_64 rng(9);
    const auto m = random_model(rng, 3, 5, 4);
    const auto s0 = m.span_of(m.domain().lo);
    CHECK(s0.i == 0);
    CHECK(s0.j == 0);
    const auto s1 = m.span_of(m.domain().hi);
    CHECK(s1.i == 4);
    CHECK(s1.j == 3);
    // an interior knot goes to the lower span
    const double knot_x = m.domain().lo[0] + m.domain().width(0) * 2.0 / 5.0;
    CHECK(m.span_of({knot_x, 0.0}).i == 1);
    for (int k = 0; k < 200; ++k) {
        const Vec2 x = random_point(rng, m.domain());
        CHECK(m.span_of(x).bounds.contains(x));
    }
    CHECK(kind_of([&] { m.span_of({-5.0, 0.0}); }) == ErrorKind::Domain);
}

TEST_CASE("derivative control points") {
    SUBCASE("constant model") {
        const auto ku = KnotVector::uniform(3, 4);
        MfaModel m(ku, ku, std::vector<double>(49, 1.25), {{0, 0}, {1, 1}});
        for (int d = 0; d < 2; ++d)
            for (double c : m.derivative_control_points(d)) CHECK(c == 0.0);
    }
    SUBCASE("linear in x1") {
        const double a = -1.75;
        const Box dom{{2, -1}, {5, 1}};
        const auto g = grid_of([&](const Vec2& x) { return a * x[0] + 0.5; }, dom, 30, 30);
        const auto m = fit(g, 3, 7, 7);
        for (double c : m.derivative_control_points(0)) CHECK(c == doctest::Approx(a).epsilon(1e-9));
    }
    SUBCASE("random model: derivative spline equals evaluate") {
        std::mt19937_64 rng(10);
        const auto m = random_model(rng, 4, 5, 3);
        for (int dim = 0; dim < 2; ++dim) {
            const auto dc = m.derivative_control_points(dim);
            const KnotVector& kd = dim == 0 ? m.knots_u() : m.knots_v();
            // the derivative spline drops one degree and the outer knots along dim
            std::vector<double> t(kd.knots().begin() + 1, kd.knots().end() - 1);
            const KnotVector kdd(m.degree() - 1, t);
            const KnotVector& ku = dim == 0 ? kdd : m.knots_u();
            const KnotVector& kv = dim == 0 ? m.knots_v() : kdd;
            const int cols = kv.num_ctrl();
            REQUIRE(dc.size() == static_cast<std::size_t>(ku.num_ctrl()) * cols);
            for (int k = 0; k < 100; ++k) {
                const Vec2 x = random_point(rng, m.domain());
                const Vec2 u = m.to_param(x);
                double v = 0.0;
                for (const auto& bu : basis_values(ku, u[0], 0))
                    for (const auto& bv : basis_values(kv, u[1], 0))
                        v += dc[static_cast<std::size_t>(bu.index) * cols + bv.index] * bu.values[0] * bv.values[0];
                const double ev = m.evaluate(x, dim == 0, dim == 1);
                CHECK(std::abs(v - ev) <= 1e-10 * std::max(1.0, std::abs(ev)));
            }
        }
    }
}

TEST_CASE("model file round trip is bit-identical") {
    std::mt19937_64 rng(11);
    const auto m = random_model(rng, 4, 6, 5);
    std::stringstream ss;
    write_model(m, ss);
    const auto r = read_model(ss);
    CHECK(r.degree() == m.degree());
    CHECK(r.knots_u().knots() == m.knots_u().knots());
    CHECK(r.knots_v().knots() == m.knots_v().knots());
    CHECK(r.ctrl_values() == m.ctrl_values());
    CHECK(r.domain().lo == m.domain().lo);
    CHECK(r.domain().hi == m.domain().hi);
}

TEST_CASE("model file errors") {
    std::mt19937_64 rng(12);
    const auto m = random_model(rng, 2, 3, 2);
    std::stringstream ss;
    write_model(m, ss);
    const std::string text = ss.str();
    SUBCASE("mismatched ctrl dimensions") {
        auto j = nlohmann::json::parse(text);
        j["ctrl_rows"] = j["ctrl_rows"].get<int>() + 1;
        std::stringstream in(j.dump());
        CHECK(kind_of([&] { read_model(in); }) == ErrorKind::Parse);
    }
    SUBCASE("non-monotone knots") {
        auto j = nlohmann::json::parse(text);
        j["knots_u"] = {0.0, 0.0, 0.0, 0.7, 0.3, 1.0, 1.0, 1.0};
        std::stringstream in(j.dump());
        CHECK(kind_of([&] { read_model(in); }) == ErrorKind::Validation);
    }
    SUBCASE("malformed text") {
        std::stringstream in("{\"degree\": 3, ");
        CHECK(kind_of([&] { read_model(in); }) == ErrorKind::Parse);
    }
    SUBCASE("missing file") { CHECK(kind_of([] { load_model("/nonexistent/model.json"); }) == ErrorKind::Io); }
}

TEST_CASE("grid CSV round trip and errors") {
    const std::string path = "test_grid_roundtrip.csv";
    GridData g = grid_of([](const Vec2& x) { return std::sin(x[0]) * x[1]; }, {{-1, 2}, {1, 3}}, 5, 7);
    save_grid(g, path);
    const GridData r = load_grid(path);
    CHECK(r.nx == 5);
    CHECK(r.ny == 7);
    CHECK(r.values == g.values);
    CHECK(r.domain.lo == g.domain.lo);
    CHECK(r.domain.hi == g.domain.hi);
    {
        std::ofstream os(path);
        os << "3,3\n1,2,3\n4,5\n7,8,9\n";
    }
    CHECK(kind_of([&] { load_grid(path); }) == ErrorKind::Parse);
    std::remove(path.c_str());
}
