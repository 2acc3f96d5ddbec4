#include "mfatopo/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace mfatopo {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSchwefelHalf = std::pow(10.5 * kPi, 2);

// Accumulates w * exp(-(ax (x - cx)^2 + ay (y - cy)^2)) and its derivatives.
void add_gaussian(FieldSample& s, const Vec2& x, double w, double cx, double cy, double ax, double ay) {
    const double dx = x[0] - cx, dy = x[1] - cy;
    const double e = w * std::exp(-(ax * dx * dx + ay * dy * dy));
    const double gx = -2.0 * ax * dx, gy = -2.0 * ay * dy;
    s.value += e;
    s.grad += e * Vec2(gx, gy);
    Mat2 h;
    h << gx * gx - 2.0 * ax, gx * gy, gx * gy, gy * gy - 2.0 * ay;
    s.hess += e * h;
}

// x sin(sqrt|x|) and its first two derivatives.
std::array<double, 3> schwefel_term(double x) {
    const double r = std::sqrt(std::abs(x));
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const double sg = x > 0 ? 1.0 : -1.0;
    return {x * std::sin(r), std::sin(r) + 0.5 * r * std::cos(r),
            sg / (2.0 * r) * (1.5 * std::cos(r) - 0.5 * r * std::sin(r))};
}

// sin(5x)/x with its limit at 0.
std::array<double, 3> sinc_term(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return {5.0 - 125.0 / 6.0 * x2 + 625.0 / 24.0 * x2 * x2, -125.0 / 3.0 * x + 625.0 / 6.0 * x2 * x,
                -125.0 / 3.0 + 312.5 * x2};
    }
    const double s = std::sin(5.0 * x), c = std::cos(5.0 * x);
    return {s / x, (5.0 * x * c - s) / (x * x), (-25.0 * x * x * s - 10.0 * x * c + 2.0 * s) / (x * x * x)};
}

}  // namespace

const char* to_string(Synthetic s) {
    switch (s) {
        case Synthetic::Schwefel: return "schwefel";
        case Synthetic::Sinc: return "sinc";
        case Synthetic::GaussianPairF: return "gaussian_pair_f";
        case Synthetic::GaussianPairG: return "gaussian_pair_g";
        case Synthetic::GaussianMixture: return "gaussian_mixture";
    }
    return "unknown";
}

Synthetic synthetic_from_string(const std::string& name) {
    for (Synthetic s : all_synthetics())
        if (name == to_string(s)) return s;
    throw Error(ErrorKind::Usage, "unknown synthetic field '" + name +
                                      "' (expected schwefel, sinc, gaussian_pair_f, gaussian_pair_g, gaussian_mixture)");
}

std::vector<Synthetic> all_synthetics() {
    return {Synthetic::Schwefel, Synthetic::Sinc, Synthetic::GaussianPairF, Synthetic::GaussianPairG,
            Synthetic::GaussianMixture};
}

Box synthetic_domain(Synthetic s) {
    switch (s) {
        case Synthetic::Schwefel: return {{-kSchwefelHalf, -kSchwefelHalf}, {kSchwefelHalf, kSchwefelHalf}};
        case Synthetic::Sinc: return {{-2.0 * kPi, -2.0 * kPi}, {2.0 * kPi, 2.0 * kPi}};
        case Synthetic::GaussianPairF:
        case Synthetic::GaussianPairG: return {{0.1, 0.0}, {0.9, 0.6}};
        case Synthetic::GaussianMixture: return {{-1.0, -0.8}, {1.0, 2.3}};
    }
    throw Error(ErrorKind::Usage, "unknown synthetic field");
}

std::array<int, 2> synthetic_spans(Synthetic s) {
    switch (s) {
        case Synthetic::Schwefel: return {71, 71};
        case Synthetic::Sinc: return {27, 27};
        case Synthetic::GaussianPairF:
        case Synthetic::GaussianPairG: return {17, 11};
        case Synthetic::GaussianMixture: return {46, 71};
    }
    throw Error(ErrorKind::Usage, "unknown synthetic field");
}

FieldSample eval_analytic_sample(Synthetic s, const Vec2& x) {
    FieldSample out;
    switch (s) {
        case Synthetic::Schwefel: {
            const auto t1 = schwefel_term(x[0]), t2 = schwefel_term(x[1]);
            out.value = 0.5 * (418.9829 * 2.0 - t1[0] - t2[0]);
            out.grad = {-0.5 * t1[1], -0.5 * t2[1]};
            out.hess << -0.5 * t1[2], 0.0, 0.0, -0.5 * t2[2];
            break;
        }
        case Synthetic::Sinc: {
            const auto t1 = sinc_term(x[0]), t2 = sinc_term(x[1]);
            out.value = t1[0] + t2[0];
            out.grad = {t1[1], t2[1]};
            out.hess << t1[2], 0.0, 0.0, t2[2];
            break;
        }
        case Synthetic::GaussianPairF:
            add_gaussian(out, x, 0.25, 0.5, 0.4, 50.0, 50.0);
            break;
        case Synthetic::GaussianPairG:
            add_gaussian(out, x, 0.25, 0.3, 0.2, 50.0, 50.0);
            add_gaussian(out, x, 0.25, 0.75, 0.25, 50.0, 1.0 / 0.0288);
            break;
        case Synthetic::GaussianMixture:
            add_gaussian(out, x, 1.0, -0.4, 0.0, 8.0, 4.0);
            add_gaussian(out, x, 1.0, 0.5, 0.0, 8.0, 4.0);
            add_gaussian(out, x, 1.0, 0.0, 0.77, 8.0, 4.0);
            add_gaussian(out, x, 1.0, 0.0, 1.5, 8.0, 4.0);
            add_gaussian(out, x, 0.2, 0.0, 0.5, 0.3, 0.3);
            break;
    }
    return out;
}

double eval_analytic(Synthetic s, const Vec2& x) { return eval_analytic_sample(s, x).value; }

GridData make_grid(const std::function<double(const Vec2&)>& fn, const Box& domain, int nx, int ny) {
    if (nx < 2 || ny < 2) throw Error(ErrorKind::Usage, "grid needs at least 2 samples per dimension");
    GridData g;
    g.nx = nx;
    g.ny = ny;
    g.domain = domain;
    g.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) g.at(i, j) = fn(g.position(i, j));
    return g;
}

GridData make_grid(Synthetic s, int nx, int ny) {
    return make_grid([s](const Vec2& x) { return eval_analytic(s, x); }, synthetic_domain(s), nx, ny);
}

MfaModel fit_synthetic(Synthetic s, int degree, int samples_per_span, FitReport* report) {
    const auto spans = synthetic_spans(s);
    const GridData grid = make_grid(s, samples_per_span * spans[0] + 1, samples_per_span * spans[1] + 1);
    return fit(grid, degree, spans[0] + degree, spans[1] + degree, report);
}

}  // namespace mfatopo
