#pragma once

#include <array>
#include <vector>

namespace mfatopo {

inline constexpr int kMaxDegree = 8;
inline constexpr int kMaxDerivOrder = 3;

// Clamped knot vector over [0,1]: first and last knots repeated degree+1 times.
class KnotVector {
public:
    KnotVector() = default;
    // Validates monotonicity and clamping; throws Error(Validation) otherwise.
    KnotVector(int degree, std::vector<double> knots);
    // Clamped knot vector with `spans` uniform interior intervals.
    static KnotVector uniform(int degree, int spans);

    int degree() const { return p_; }
    const std::vector<double>& knots() const { return t_; }
    int num_ctrl() const { return static_cast<int>(t_.size()) - p_ - 1; }
    int num_spans() const { return num_ctrl() - p_; }
    bool is_uniform(double tol = 1e-12) const;

    // Index k of the knot interval [t_k, t_{k+1}) holding u; k in [p, n-1].
    // Interior knot ties resolve toward the lower interval.
    int find_span(double u) const;

private:
    int p_ = 0;
    std::vector<double> t_;
};

// Nonzero basis values N_{k-p..k,p}(u) and derivatives up to `order`,
// ders[d][a] = d^d/du^d N_{k-p+a,p}(u). Evaluation at u outside [0,1] extends
// the polynomial of span k.
struct BasisDerivs {
    int first = 0;  // index of the first active basis function (k - p)
    int order = 0;
    std::array<std::array<double, kMaxDegree + 1>, kMaxDerivOrder + 1> ders{};
};

void basis_derivs(const KnotVector& kv, int span, double u, int order, BasisDerivs& out);

struct BasisEntry {
    int index;
    std::vector<double> values;  // values[d] for d = 0..order
};

// Checked public form: u must lie in [0,1] and order in [0, p].
std::vector<BasisEntry> basis_values(const KnotVector& kv, double u, int order);

}  // namespace mfatopo
