#pragma once

#include <functional>

#include "epiprox/epigraph.hpp"

namespace epiprox {

// Decomposable level-set constraint Σℓ h⁽ℓ⁾(y⁽ℓ⁾) ≤ eta on the stacked
// transformed vector.
struct DecomposableConstraint {
  BlockLayout layout;
  std::vector<EpiKind> kinds;
  double eta = 0.0;

  void validate() const {
    if (kinds.size() != layout.blocks.size())
      throw std::invalid_argument("constraint: kinds/layout mismatch");
    if (!(eta >= 0.0)) throw std::invalid_argument("constraint: eta >= 0");
  }
};

enum class BudgetForm { Inequality, Equality };

struct SplitConstraint {
  HalfSpace halfspace;
  std::function<EpiState(EpiState)> epi_projector;
  std::function<Vec(Vec)> budget_projector;
};

// Rewrites the level-set constraint as ζ ∈ V (budget) plus (y, ζ) ∈ E
// (product of epigraphs).
SplitConstraint split(const DecomposableConstraint& c,
                      BudgetForm form = BudgetForm::Inequality,
                      int threads = 1);

// Σℓ h⁽ℓ⁾(y⁽ℓ⁾) on the stacked vector.
double constraint_value(const DecomposableConstraint& c, const Vec& y);

// ζ⁽ℓ⁾ = h⁽ℓ⁾(y⁽ℓ⁾), shifted uniformly down so the budget holds.
Vec init_zeta(const DecomposableConstraint& c, const Vec& y);

struct Membership {
  bool member = false;
  double violation = 0.0;
};

Membership check_membership(const DecomposableConstraint& c, const Vec& y,
                            double tol);

}  // namespace epiprox
