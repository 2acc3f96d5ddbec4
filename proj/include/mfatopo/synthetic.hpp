#pragma once

#include "mfatopo/field.hpp"
#include "mfatopo/model.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace mfatopo {

enum class Synthetic { Schwefel, Sinc, GaussianPairF, GaussianPairG, GaussianMixture };

const char* to_string(Synthetic s);
// Accepts schwefel, sinc, gaussian_pair_f, gaussian_pair_g, gaussian_mixture.
Synthetic synthetic_from_string(const std::string& name);
std::vector<Synthetic> all_synthetics();

Box synthetic_domain(Synthetic s);
// Span counts used for the reference models (x1, x2).
std::array<int, 2> synthetic_spans(Synthetic s);

double eval_analytic(Synthetic s, const Vec2& x);
// Value, gradient and Hessian in closed form.
FieldSample eval_analytic_sample(Synthetic s, const Vec2& x);

GridData make_grid(Synthetic s, int nx, int ny);
GridData make_grid(const std::function<double(const Vec2&)>& fn, const Box& domain, int nx, int ny);

// Grid with samples_per_span samples per span per dimension (n = k*spans + 1),
// fitted with spans + degree control points per dimension.
MfaModel fit_synthetic(Synthetic s, int degree = 4, int samples_per_span = 8, FitReport* report = nullptr);

}  // namespace mfatopo
