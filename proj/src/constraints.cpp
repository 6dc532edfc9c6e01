#include "epiprox/constraints.hpp"

namespace epiprox {

SplitConstraint split(const DecomposableConstraint& c, BudgetForm form,
                      int threads) {
  c.validate();
  const int L = c.layout.num_blocks();
  SplitConstraint out;
  out.halfspace = HalfSpace{L, c.eta};
  out.epi_projector = [layout = c.layout, kinds = c.kinds,
                       threads](EpiState s) {
    return project_epi_stack(layout, kinds, std::move(s), threads);
  };
  if (form == BudgetForm::Inequality)
    out.budget_projector = [hs = out.halfspace](Vec z) {
      return project_halfspace(hs, std::move(z));
    };
  else
    out.budget_projector = [hs = out.halfspace](Vec z) {
      return project_hyperplane(hs, std::move(z));
    };
  return out;
}

double constraint_value(const DecomposableConstraint& c, const Vec& y) {
  const auto off = c.layout.offsets();
  const int L = c.layout.num_blocks();
  if (static_cast<int>(y.size()) != off[L])
    throw std::invalid_argument("constraint_value: size mismatch");
  double s = 0.0;
  for (int l = 0; l < L; ++l)
    s += kind_value(c.kinds[l], std::span<const double>(y.data() + off[l],
                                                        off[l + 1] - off[l]));
  return s;
}

Vec init_zeta(const DecomposableConstraint& c, const Vec& y) {
  const auto off = c.layout.offsets();
  const int L = c.layout.num_blocks();
  if (static_cast<int>(y.size()) != off[L])
    throw std::invalid_argument("init_zeta: size mismatch");
  Vec zeta(L);
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    zeta[l] = kind_value(c.kinds[l], std::span<const double>(
                                         y.data() + off[l], off[l + 1] - off[l]));
    total += zeta[l];
  }
  const double shift = std::max(0.0, (total - c.eta) / L);
  for (double& z : zeta) z -= shift;
  return zeta;
}

Membership check_membership(const DecomposableConstraint& c, const Vec& y,
                            double tol) {
  const double violation = constraint_value(c, y) - c.eta;
  return {violation <= tol, violation};
}

}  // namespace epiprox
