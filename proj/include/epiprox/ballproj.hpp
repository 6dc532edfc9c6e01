#pragma once

#include "epiprox/blocks.hpp"
#include "epiprox/prox.hpp"

namespace epiprox {

// Euclidean projection onto {y : Σℓ ‖y⁽ℓ⁾‖₂ ≤ eta} over contiguous stacked
// blocks with unit weights.
Vec project_l12_ball(const BlockLayout& layout, double eta, const Vec& y);

// Euclidean projection onto {y : Σℓ ‖y⁽ℓ⁾‖_∞ ≤ eta}, via bisection on the
// Lagrange multiplier and Moreau decomposition of the blockwise ℓ∞ prox.
Vec project_l1inf_ball(const BlockLayout& layout, double eta, const Vec& y,
                       double tol = 1e-10);

}  // namespace epiprox
