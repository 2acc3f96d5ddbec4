#include "mfatopo/model.hpp"

#include <cmath>
#include <sstream>

namespace mfatopo {

Vec2 GridData::position(int i, int j) const {
    // offsets from the center keep mirrored lattice points exact negatives
    auto coord = [&](int k, int n, int dim) {
        if (n <= 1) return domain.lo[dim];
        const double c = 0.5 * (domain.lo[dim] + domain.hi[dim]);
        return c + (k - 0.5 * (n - 1)) * (domain.width(dim) / (n - 1));
    };
    Vec2 x{coord(i, nx, 0), coord(j, ny, 1)};
    if (i == 0) x[0] = domain.lo[0];
    if (j == 0) x[1] = domain.lo[1];
    if (i == nx - 1) x[0] = domain.hi[0];
    if (j == ny - 1) x[1] = domain.hi[1];
    return x;
}

void GridData::validate() const {
    if (nx < 2 || ny < 2) throw Error(ErrorKind::Validation, "grid needs at least 2 samples per dimension");
    if (values.size() != static_cast<std::size_t>(nx) * ny)
        throw Error(ErrorKind::Validation, "grid value count does not match nx*ny");
    if (!(domain.width(0) > 0.0) || !(domain.width(1) > 0.0))
        throw Error(ErrorKind::Validation, "grid domain must have positive extent");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorKind::Validation, "grid contains non-finite values");
}

MfaModel::MfaModel(KnotVector ku, KnotVector kv, std::vector<double> ctrl, Box domain)
    : ku_(std::move(ku)), kv_(std::move(kv)), ctrl_(std::move(ctrl)), domain_(domain) {
    if (ku_.degree() != kv_.degree())
        throw Error(ErrorKind::Validation, "knot vectors must share one degree");
    if (ctrl_.size() != static_cast<std::size_t>(ku_.num_ctrl()) * kv_.num_ctrl()) {
        std::ostringstream os;
        os << "control grid has " << ctrl_.size() << " values, knots require " << ku_.num_ctrl() << "x"
           << kv_.num_ctrl();
        throw Error(ErrorKind::Validation, os.str());
    }
    if (!ku_.is_uniform(1e-9) || !kv_.is_uniform(1e-9))
        throw Error(ErrorKind::Validation, "interior knots must be uniform");
    for (double c : ctrl_)
        if (!std::isfinite(c)) throw Error(ErrorKind::Validation, "non-finite control point");
    spans_ = SpanGrid(domain_, ku_.num_spans(), kv_.num_spans());
}

Vec2 MfaModel::to_param(const Vec2& x) const {
    return {(x[0] - domain_.lo[0]) / domain_.width(0), (x[1] - domain_.lo[1]) / domain_.width(1)};
}

Derivs MfaModel::derivs(const Vec2& x, int order) const {
    const int p = degree();
    order = std::min(order, kMaxDerivOrder);
    auto [si, sj] = spans_.locate_clamped(x);
    const Vec2 u = to_param(x);
    BasisDerivs bu, bv;
    basis_derivs(ku_, si + p, u[0], order, bu);
    basis_derivs(kv_, sj + p, u[1], order, bv);

    Derivs out;
    const double su = 1.0 / domain_.width(0), sv = 1.0 / domain_.width(1);
    const int n2 = ctrl_cols();
    // contract along v first: tmp[b][a] = sum_c Nv^(b)_c P[first_u + a][first_v + c]
    double tmp[kMaxDerivOrder + 1][kMaxDegree + 1];
    for (int b = 0; b <= order; ++b) {
        for (int a = 0; a <= p; ++a) {
            const double* row = &ctrl_[static_cast<std::size_t>(bu.first + a) * n2 + bv.first];
            double acc = 0.0;
            for (int c = 0; c <= p; ++c) acc += bv.ders[b][c] * row[c];
            tmp[b][a] = acc;
        }
    }
    double scale_u[kMaxDerivOrder + 1] = {1.0, su, su * su, su * su * su};
    double scale_v[kMaxDerivOrder + 1] = {1.0, sv, sv * sv, sv * sv * sv};
    for (int da = 0; da <= order; ++da) {
        for (int db = 0; da + db <= order; ++db) {
            double acc = 0.0;
            for (int a = 0; a <= p; ++a) acc += bu.ders[da][a] * tmp[db][a];
            out.d[da][db] = acc * scale_u[da] * scale_v[db];
        }
    }
    return out;
}

double MfaModel::value(const Vec2& x) const { return derivs(x, 0).value(); }

double MfaModel::evaluate(const Vec2& x, int d1, int d2) const {
    if (!domain_.contains(x)) throw Error(ErrorKind::Domain, "evaluation point outside model domain");
    const int p = degree();
    if (d1 < 0 || d2 < 0 || d1 + d2 > kMaxDerivOrder || d1 > p || d2 > p || (d1 + d2 == 3 && p < 3)) {
        std::ostringstream os;
        os << "derivative order (" << d1 << "," << d2 << ") unsupported for degree " << p;
        throw Error(ErrorKind::Order, os.str());
    }
    return derivs(x, d1 + d2)(d1, d2);
}

SpanIndex MfaModel::span_of(const Vec2& x) const { return spans_.locate(x); }

std::vector<double> MfaModel::derivative_control_points(int dim) const {
    const int p = degree();
    const int n1 = ctrl_rows(), n2 = ctrl_cols();
    std::vector<double> q;
    if (dim == 0) {
        const auto& t = ku_.knots();
        const double s = 1.0 / domain_.width(0);
        q.resize(static_cast<std::size_t>(n1 - 1) * n2);
        for (int i = 0; i + 1 < n1; ++i) {
            const double c = p / (t[i + p + 1] - t[i + 1]) * s;
            for (int j = 0; j < n2; ++j) q[static_cast<std::size_t>(i) * n2 + j] = c * (ctrl(i + 1, j) - ctrl(i, j));
        }
    } else if (dim == 1) {
        const auto& t = kv_.knots();
        const double s = 1.0 / domain_.width(1);
        q.resize(static_cast<std::size_t>(n1) * (n2 - 1));
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j + 1 < n2; ++j) {
                const double c = p / (t[j + p + 1] - t[j + 1]) * s;
                q[static_cast<std::size_t>(i) * (n2 - 1) + j] = c * (ctrl(i, j + 1) - ctrl(i, j));
            }
    } else {
        throw Error(ErrorKind::Usage, "dimension must be 0 or 1");
    }
    return q;
}

bool MfaModel::same_spans(const MfaModel& other) const {
    return ku_.knots() == other.ku_.knots() && kv_.knots() == other.kv_.knots() &&
           domain_.lo == other.domain_.lo && domain_.hi == other.domain_.hi;
}

namespace {

Eigen::MatrixXd collocation(const KnotVector& kv, int samples) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(samples, kv.num_ctrl());
    BasisDerivs bd;
    for (int i = 0; i < samples; ++i) {
        const double u = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.0;
        basis_derivs(kv, kv.find_span(u), u, 0, bd);
        for (int a = 0; a <= kv.degree(); ++a) b(i, bd.first + a) = bd.ders[0][a];
    }
    return b;
}

// Solves (B^T B) X = rhs, adding a tiny ridge only when the system is singular.
Eigen::MatrixXd solve_normal(const Eigen::MatrixXd& b, const Eigen::MatrixXd& rhs, FitReport& rep) {
    Eigen::MatrixXd a = b.transpose() * b;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    double rc = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
    if (ldlt.info() != Eigen::Success || !(rc > 1e-14)) {
        const double ridge = 1e-12 * std::max(1.0, a.diagonal().maxCoeff());
        a.diagonal().array() += ridge;
        ldlt.compute(a);
        rep.regularized = true;
        if (ldlt.info() != Eigen::Success) {
            std::ostringstream os;
            os << "normal equations singular (rcond estimate " << rc << ")";
            throw Error(ErrorKind::Fit, os.str());
        }
    }
    rep.condition_estimate = rep.condition_estimate == 0.0 ? rc : std::min(rep.condition_estimate, rc);
    return ldlt.solve(rhs);
}

}  // namespace

MfaModel fit(const GridData& data, int degree, int n1, int n2, FitReport* report) {
    data.validate();
    if (degree < 1 || degree > kMaxDegree) throw Error(ErrorKind::Usage, "degree out of range");
    if (n1 < degree + 1 || n2 < degree + 1)
        throw Error(ErrorKind::Fit, "need at least degree+1 control points per dimension");
    if (n1 > data.nx || n2 > data.ny) {
        std::ostringstream os;
        os << "underdetermined fit: " << n1 << "x" << n2 << " control points for " << data.nx << "x" << data.ny
           << " samples";
        throw Error(ErrorKind::Fit, os.str());
    }
    KnotVector ku = KnotVector::uniform(degree, n1 - degree);
    KnotVector kv = KnotVector::uniform(degree, n2 - degree);
    const Eigen::MatrixXd bu = collocation(ku, data.nx);
    const Eigen::MatrixXd bv = collocation(kv, data.ny);
    Eigen::MatrixXd f(data.nx, data.ny);
    for (int i = 0; i < data.nx; ++i)
        for (int j = 0; j < data.ny; ++j) f(i, j) = data.at(i, j);

    FitReport rep;
    // min |F - Bu P Bv^T|: solve along u, then along v.
    const Eigen::MatrixXd x = solve_normal(bu, bu.transpose() * f, rep);        // n1 x ny
    const Eigen::MatrixXd pt = solve_normal(bv, bv.transpose() * x.transpose(), rep);  // n2 x n1
    std::vector<double> ctrl(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) ctrl[static_cast<std::size_t>(i) * n2 + j] = pt(j, i);

    const Eigen::MatrixXd r = f - bu * pt.transpose() * bv.transpose();
    rep.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
    rep.max_residual = r.cwiseAbs().maxCoeff();
    if (report) *report = rep;
    return MfaModel(std::move(ku), std::move(kv), std::move(ctrl), data.domain);
}

}  // namespace mfatopo
