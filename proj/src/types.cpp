#include "mfatopo/types.hpp"

#include <cmath>

namespace mfatopo {

SpanGrid::SpanGrid(Box domain, int nu, int nv) : domain_(domain), nu_(nu), nv_(nv) {
    if (nu < 1 || nv < 1) throw Error(ErrorKind::Validation, "span grid needs at least one span per dimension");
    if (!(domain.width(0) > 0.0) || !(domain.width(1) > 0.0))
        throw Error(ErrorKind::Validation, "domain must have positive extent");
}

Box SpanGrid::bounds(int i, int j) const {
    Box b;
    const double w0 = domain_.width(0), w1 = domain_.width(1);
    b.lo = {domain_.lo[0] + w0 * i / nu_, domain_.lo[1] + w1 * j / nv_};
    b.hi = {i + 1 == nu_ ? domain_.hi[0] : domain_.lo[0] + w0 * (i + 1) / nu_,
            j + 1 == nv_ ? domain_.hi[1] : domain_.lo[1] + w1 * (j + 1) / nv_};
    return b;
}

int SpanGrid::locate_dim(double x, int dim) const {
    const int n = count(dim);
    const double lo = domain_.lo[dim], w = domain_.width(dim);
    int k = static_cast<int>(std::ceil((x - lo) / w * n)) - 1;
    k = std::clamp(k, 0, n - 1);
    // settle rounding against the bounds formula used by bounds()
    auto lower = [&](int s) { return lo + w * s / n; };
    auto upper = [&](int s) { return s + 1 == n ? domain_.hi[dim] : lo + w * (s + 1) / n; };
    while (k > 0 && x <= lower(k)) --k;
    while (k + 1 < n && x > upper(k)) ++k;
    return k;
}

SpanIndex SpanGrid::locate(const Vec2& x) const {
    if (!domain_.contains(x)) throw Error(ErrorKind::Domain, "point outside domain");
    return span(locate_dim(x[0], 0), locate_dim(x[1], 1));
}

std::pair<int, int> SpanGrid::locate_clamped(const Vec2& x) const {
    return {locate_dim(x[0], 0), locate_dim(x[1], 1)};
}

}  // namespace mfatopo
