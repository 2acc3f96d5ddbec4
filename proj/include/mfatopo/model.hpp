#pragma once

#include "mfatopo/bspline.hpp"
#include "mfatopo/types.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfatopo {

// Row-major grid of samples; value(i, j) sits at x1 index i, x2 index j.
struct GridData {
    int nx = 0;
    int ny = 0;
    Box domain;
    std::vector<double> values;  // size nx * ny, index i * ny + j

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * ny + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * ny + j]; }
    Vec2 position(int i, int j) const;
    void validate() const;
};

// Partial derivatives d^{a+b} f / dx1^a dx2^b for a + b <= 3, physical units.
struct Derivs {
    std::array<std::array<double, 4>, 4> d{};
    double operator()(int a, int b) const { return d[a][b]; }
    double value() const { return d[0][0]; }
    Vec2 gradient() const { return {d[1][0], d[0][1]}; }
    Mat2 hessian() const {
        Mat2 h;
        h << d[2][0], d[1][1], d[1][1], d[0][2];
        return h;
    }
};

// Tensor-product B-spline surface over a physical rectangle. Immutable after
// construction; all queries are const and thread-safe.
class MfaModel {
public:
    MfaModel() = default;
    // ctrl is n1 x n2 row-major, n1 along x1.
    MfaModel(KnotVector ku, KnotVector kv, std::vector<double> ctrl, Box domain);

    int degree() const { return ku_.degree(); }
    const KnotVector& knots_u() const { return ku_; }
    const KnotVector& knots_v() const { return kv_; }
    int ctrl_rows() const { return ku_.num_ctrl(); }
    int ctrl_cols() const { return kv_.num_ctrl(); }
    double ctrl(int j1, int j2) const { return ctrl_[static_cast<std::size_t>(j1) * ctrl_cols() + j2]; }
    const std::vector<double>& ctrl_values() const { return ctrl_; }
    const Box& domain() const { return domain_; }
    const SpanGrid& spans() const { return spans_; }

    // Checked query: x inside the domain, d1 + d2 <= 3 and each order <= degree.
    double evaluate(const Vec2& x, int d1, int d2) const;
    // All partials up to total order `order` (<= 3). Unchecked: x outside the
    // domain extends the boundary span polynomial.
    Derivs derivs(const Vec2& x, int order) const;
    double value(const Vec2& x) const;

    SpanIndex span_of(const Vec2& x) const;

    // Control points of the first-derivative spline along dim (0 = x1, 1 = x2),
    // scaled to physical units. Shape (n1-1) x n2 for dim 0, n1 x (n2-1) for dim 1.
    std::vector<double> derivative_control_points(int dim) const;

    bool same_spans(const MfaModel& other) const;

    Vec2 to_param(const Vec2& x) const;

private:
    KnotVector ku_, kv_;
    std::vector<double> ctrl_;
    Box domain_;
    SpanGrid spans_;
};

struct FitReport {
    double rms_residual = 0.0;
    double max_residual = 0.0;
    double condition_estimate = 0.0;  // reciprocal condition of the worse normal matrix
    bool regularized = false;
};

// Least-squares fit with n1 x n2 control points and clamped uniform knots.
// Samples are parameterized uniformly over [0,1]^2.
MfaModel fit(const GridData& data, int degree, int n1, int n2, FitReport* report = nullptr);

void save_model(const MfaModel& model, const std::string& path);
MfaModel load_model(const std::string& path);
void write_model(const MfaModel& model, std::ostream& os);
MfaModel read_model(std::istream& is, const std::string& source = "<stream>");

// CSV grid: header "nx,ny[,x1min,x1max,x2min,x2max]" then nx rows of ny values.
GridData load_grid(const std::string& path);
void save_grid(const GridData& grid, const std::string& path);

}  // namespace mfatopo
