#include "doctest.h"
#include "support.hpp"

#include "mfatopo/synthetic.hpp"

using namespace mfatopo;
using namespace testsupport;

TEST_CASE("analytic values") {
    const double pi = M_PI;
    CHECK(eval_analytic(Synthetic::Sinc, {pi / 10, pi / 10}) == doctest::Approx(20 / pi).epsilon(1e-14));
    CHECK(eval_analytic(Synthetic::Sinc, {0, 0}) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(eval_analytic(Synthetic::Schwefel, {0, 0}) == doctest::Approx(418.9829).epsilon(1e-14));

    const double mix = std::exp(-8 * 0.16 - 4 * 0.25) + std::exp(-8 * 0.25 - 4 * 0.25) + std::exp(-4 * 0.27 * 0.27) +
                       std::exp(-4 * 1.0) + 0.2;
    CHECK(eval_analytic(Synthetic::GaussianMixture, {0, 0.5}) == doctest::Approx(mix).epsilon(1e-14));
    CHECK(eval_analytic(Synthetic::GaussianPairF, {0.5, 0.4}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(eval_analytic(Synthetic::GaussianPairG, {0.3, 0.2}) ==
          doctest::Approx(0.25 + 0.25 * std::exp(-0.2025 / 0.02 - 0.0025 / 0.0288)).epsilon(1e-14));
}

TEST_CASE("names, domains and span counts") {
    for (Synthetic s : all_synthetics()) CHECK(synthetic_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(synthetic_from_string("nope"), Error);
    const double w = std::pow(10.5 * M_PI, 2);
    CHECK(synthetic_domain(Synthetic::Schwefel).lo[0] == doctest::Approx(-w));
    CHECK(synthetic_domain(Synthetic::Schwefel).hi[1] == doctest::Approx(w));
    CHECK(synthetic_domain(Synthetic::Sinc).hi[0] == doctest::Approx(2 * M_PI));
    const Box gp = synthetic_domain(Synthetic::GaussianPairF);
    CHECK(gp.lo == Vec2(0.1, 0.0));
    CHECK(gp.hi == Vec2(0.9, 0.6));
    const Box gm = synthetic_domain(Synthetic::GaussianMixture);
    CHECK(gm.lo == Vec2(-1.0, -0.8));
    CHECK(gm.hi == Vec2(1.0, 2.3));
    CHECK(synthetic_spans(Synthetic::Sinc) == std::array<int, 2>{27, 27});
}

TEST_CASE("analytic derivatives match finite differences") {
    std::mt19937_64 rng(9);
    for (Synthetic s : all_synthetics()) {
        INFO(std::string(to_string(s)));
        const Box b = synthetic_domain(s);
        const double h = 1e-6 * b.width(0);
        for (int k = 0; k < 100; ++k) {
            const Vec2 x = random_point(rng, b, 0.01 * b.width(0));
            const FieldSample a = eval_analytic_sample(s, x);
            CHECK(a.value == eval_analytic(s, x));
            for (int d = 0; d < 2; ++d) {
                Vec2 e = Vec2::Zero();
                e[d] = h;
                const double fd = (eval_analytic(s, x + e) - eval_analytic(s, x - e)) / (2 * h);
                CHECK(std::abs(fd - a.grad[d]) <= 1e-5 * std::max(1.0, a.grad.norm()));
                const Vec2 hd = (eval_analytic_sample(s, x + e).grad - eval_analytic_sample(s, x - e).grad) / (2 * h);
                CHECK((hd - a.hess.col(d)).norm() <= 1e-5 * std::max(1.0, a.hess.norm()));
            }
        }
    }
}

TEST_CASE("make_grid") {
    const auto c = make_grid([](const Vec2&) { return 4.0; }, {{0, 0}, {1, 2}}, 5, 7);
    CHECK(c.nx == 5);
    CHECK(c.ny == 7);
    for (double v : c.values) CHECK(v == 4.0);

    const auto g = make_grid(Synthetic::Sinc, 200, 200);
    const Box b = synthetic_domain(Synthetic::Sinc);
    CHECK(g.at(0, 0) == eval_analytic(Synthetic::Sinc, b.lo));
    CHECK(g.at(199, 199) == eval_analytic(Synthetic::Sinc, b.hi));
    CHECK(g.at(0, 199) == eval_analytic(Synthetic::Sinc, {b.lo[0], b.hi[1]}));
    CHECK(g.at(199, 0) == eval_analytic(Synthetic::Sinc, {b.hi[0], b.lo[1]}));
}

TEST_CASE("sinc symmetry") {
    std::mt19937_64 rng(1);
    const Box b = synthetic_domain(Synthetic::Sinc);
    for (int k = 0; k < 200; ++k) {
        const Vec2 x = random_point(rng, b);
        const double v = eval_analytic(Synthetic::Sinc, x);
        CHECK(eval_analytic(Synthetic::Sinc, {x[1], x[0]}) == v);
        CHECK(eval_analytic(Synthetic::Sinc, {-x[0], x[1]}) == v);
        CHECK(eval_analytic(Synthetic::Sinc, {x[0], -x[1]}) == v);
    }
    for (int n : {200, 201}) {
        const auto g = make_grid(Synthetic::Sinc, n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(g.at(i, j) == g.at(j, i));
                CHECK(g.at(i, j) == g.at(n - 1 - i, j));
                CHECK(g.at(i, j) == g.at(i, n - 1 - j));
            }
    }
}

TEST_CASE("fitted models follow the analytic fields") {
    std::mt19937_64 rng(42);
    for (Synthetic s : all_synthetics()) {
        FitReport rep;
        const auto m = fit_synthetic(s, 4, 8, &rep);
        const auto spans = synthetic_spans(s);
        CHECK(m.spans().count(0) == spans[0]);
        CHECK(m.spans().count(1) == spans[1]);
        const auto grid = make_grid(s, 256, 256);
        const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
        const double range = *hi - *lo;
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const Vec2 x = random_point(rng, m.domain());
            worst = std::max(worst, std::abs(m.value(x) - eval_analytic(s, x)));
        }
        INFO(std::string(to_string(s)) << ": max deviation " << worst << " over range " << range << ", fit rms " << rep.rms_residual);
        CHECK(worst < 1e-3 * range);
    }
}
