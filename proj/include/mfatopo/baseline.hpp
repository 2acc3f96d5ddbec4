#pragma once

#include "mfatopo/field.hpp"
#include "mfatopo/graph.hpp"
#include "mfatopo/model.hpp"

namespace mfatopo {

// Lattice of (spans * ratio + 1) points per dimension over the field's
// domain, every value an exact field evaluation.
GridData sample(const ScalarField& field, int ratio, int threads = 1);

// PL isocontour over quad cells with linear edge interpolation. Saddle cells
// use the cell-center average. Corners equal to `a` are nudged up by
// 1e-12 * value range. Vertices carry `a` as their value.
TopoGraph marching_squares(const GridData& grid, double a, bool exclude_boundary = false);

// Partials of the sampled values by second-order finite differences
// (central inside, one-sided on the border). order selects (d1, d2).
GridData finite_difference(const GridData& grid, int d1, int d2);

struct BaselineResult {
    TopoGraph graph;
    Residuals residuals;  // measured on the continuous field
    double wall_time = 0.0;
};

BaselineResult pl_contour(const MfaModel& f, double a, int ratio, int threads = 1);
// Marching squares on h sampled from finite-difference partials of the
// sampled f and g; domain-boundary segments dropped.
BaselineResult pl_jacobi(const MfaModel& f, const MfaModel& g, int ratio, int threads = 1);
// Same for h-tilde from the sampled f.
BaselineResult pl_ridge_valley(const MfaModel& f, int ratio, int threads = 1);

}  // namespace mfatopo
