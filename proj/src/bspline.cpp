#include "mfatopo/bspline.hpp"

#include "mfatopo/types.hpp"

#include <cmath>
#include <sstream>

namespace mfatopo {

KnotVector::KnotVector(int degree, std::vector<double> knots) : p_(degree), t_(std::move(knots)) {
    if (p_ < 1 || p_ > kMaxDegree)
        throw Error(ErrorKind::Validation, "degree must be in [1, " + std::to_string(kMaxDegree) + "]");
    if (static_cast<int>(t_.size()) < 2 * (p_ + 1))
        throw Error(ErrorKind::Validation, "knot vector too short for degree " + std::to_string(p_));
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (!(t_[i] >= t_[i - 1])) {
            std::ostringstream os;
            os << "knots not non-decreasing at index " << i;
            throw Error(ErrorKind::Validation, os.str());
        }
    }
    for (int i = 0; i <= p_; ++i) {
        if (t_[i] != 0.0 || t_[t_.size() - 1 - i] != 1.0)
            throw Error(ErrorKind::Validation, "knot vector must be clamped to [0,1]");
    }
    for (int k = p_; k < num_ctrl(); ++k) {
        if (!(t_[k + 1] > t_[k])) throw Error(ErrorKind::Validation, "repeated interior knot");
    }
}

KnotVector KnotVector::uniform(int degree, int spans) {
    if (spans < 1) throw Error(ErrorKind::Validation, "span count must be positive");
    std::vector<double> t;
    t.reserve(spans + 2 * degree + 1);
    for (int i = 0; i < degree; ++i) t.push_back(0.0);
    for (int i = 0; i <= spans; ++i) t.push_back(static_cast<double>(i) / spans);
    t.back() = 1.0;
    for (int i = 0; i < degree; ++i) t.push_back(1.0);
    return KnotVector(degree, std::move(t));
}

bool KnotVector::is_uniform(double tol) const {
    const double h = 1.0 / num_spans();
    for (int k = p_; k < num_ctrl(); ++k)
        if (std::abs((t_[k + 1] - t_[k]) - h) > tol) return false;
    return true;
}

int KnotVector::find_span(double u) const {
    const int n = num_ctrl();
    if (u <= t_[p_]) return p_;
    if (u >= t_[n]) return n - 1;
    // smallest k with u <= t_{k+1}
    int lo = p_, hi = n - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (u <= t_[mid + 1])
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

// Piegl & Tiller A2.3.
void basis_derivs(const KnotVector& kv, int span, double u, int order, BasisDerivs& out) {
    const int p = kv.degree();
    const auto& t = kv.knots();
    order = std::min(order, p);
    out.first = span - p;
    out.order = order;

    double ndu[kMaxDegree + 1][kMaxDegree + 1];
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - t[span + 1 - j];
        right[j] = t[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            double tmp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) out.ders[0][j] = ndu[j][p];

    double a[2][kMaxDegree + 1];
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= order; ++k) {
            double d = 0.0;
            int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            int j1 = rk >= -1 ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out.ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double f = p;
    for (int k = 1; k <= order; ++k) {
        for (int j = 0; j <= p; ++j) out.ders[k][j] *= f;
        f *= (p - k);
    }
    for (int k = order + 1; k <= kMaxDerivOrder; ++k)
        for (int j = 0; j <= p; ++j) out.ders[k][j] = 0.0;
}

std::vector<BasisEntry> basis_values(const KnotVector& kv, double u, int order) {
    if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::Domain, "parameter outside [0,1]");
    if (order < 0 || order > kv.degree() || order > kMaxDerivOrder)
        throw Error(ErrorKind::Order, "basis derivative order out of range");
    BasisDerivs bd;
    basis_derivs(kv, kv.find_span(u), u, order, bd);
    std::vector<BasisEntry> out;
    out.reserve(kv.degree() + 1);
    for (int a = 0; a <= kv.degree(); ++a) {
        BasisEntry e{bd.first + a, {}};
        for (int d = 0; d <= order; ++d) e.values.push_back(bd.ders[d][a]);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace mfatopo
