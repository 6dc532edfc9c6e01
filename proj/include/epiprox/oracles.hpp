#pragma once

#include <functional>

#include "epiprox/epigraph.hpp"

// Reference implementations used for validation only. Everything here is
// deliberately independent of the closed-form code paths it is checked
// against: level-set searches, alternating projections, dense matrices.
namespace epiprox::oracle {

// Dense matrix of a LinOp, row-major out_dim × in_dim, built column by
// column from unit vectors.
std::vector<Vec> dense_matrix(const LinOp& op);
Vec dense_apply(const std::vector<Vec>& m, const Vec& x);
Vec dense_adjoint_apply(const std::vector<Vec>& m, const Vec& x);

// Numerical projection onto epi h for the supported kinds: minimizes
// dist²(y, lev_θ h) + (θ − ζ)² over θ ≥ 0 by golden-section search, using
// only level-set projections (ball / box / inflated set / interval).
EpiPoint project_epi_numeric(const EpiKind& kind, const Vec& y, double zeta);

// Dykstra's alternating projection algorithm onto an intersection of convex
// sets given by their exact projectors.
Vec dykstra(const std::vector<std::function<Vec(const Vec&)>>& projectors,
            Vec x, int iters = 5000, double tol = 1e-12);

// Plain cyclic projections (POCS); converges to a point of the intersection
// when it is nonempty.
Vec alternating_projections(
    const std::vector<std::function<Vec(const Vec&)>>& projectors, Vec x,
    int iters, double tol = 0.0);

// Brute-force 1-D minimizer over [lo, hi]: fine grid followed by shrinking
// local refinement.
double minimize_scalar(const std::function<double(double)>& f, double lo,
                       double hi, int grid = 2001, int refine_rounds = 60);

}  // namespace epiprox::oracle
