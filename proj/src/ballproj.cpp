#include "epiprox/ballproj.hpp"

namespace epiprox {

Vec project_l12_ball(const BlockLayout& layout, double eta, const Vec& y) {
  if (!(eta >= 0.0)) throw std::invalid_argument("l12_ball: eta >= 0");
  const auto off = layout.offsets();
  const int L = layout.num_blocks();
  if (static_cast<int>(y.size()) != off[L])
    throw std::invalid_argument("l12_ball: size mismatch");
  Vec norms(L);
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    norms[l] = norm2(std::span<const double>(y.data() + off[l],
                                             off[l + 1] - off[l]));
    total += norms[l];
  }
  if (total <= eta) return y;
  if (eta == 0.0) return Vec(y.size(), 0.0);
  const Vec projected = project_l1_ball(eta, norms);
  Vec out(y.size(), 0.0);
  for (int l = 0; l < L; ++l) {
    if (norms[l] == 0.0) continue;  // zero block stays zero
    const double s = projected[l] / norms[l];
    for (int i = off[l]; i < off[l + 1]; ++i) out[i] = s * y[i];
  }
  return out;
}

Vec project_l1inf_ball(const BlockLayout& layout, double eta, const Vec& y,
                       double tol) {
  if (!(eta >= 0.0)) throw std::invalid_argument("l1inf_ball: eta >= 0");
  const auto off = layout.offsets();
  const int L = layout.num_blocks();
  if (static_cast<int>(y.size()) != off[L])
    throw std::invalid_argument("l1inf_ball: size mismatch");

  auto block = [&](int l) {
    return Vec(y.begin() + off[l], y.begin() + off[l + 1]);
  };
  // prox of λ‖·‖_∞ via Moreau: u − P_{λ·ball₁}(u); result per block.
  auto eval = [&](double lambda, Vec* out) {
    double s = 0.0;
    for (int l = 0; l < L; ++l) {
      Vec b = block(l);
      Vec p = (lambda > 0.0) ? b - project_l1_ball(lambda, b)
                             : b;
      s += norm_inf(p);
      if (out) std::copy(p.begin(), p.end(), out->begin() + off[l]);
    }
    return s;
  };

  if (eval(0.0, nullptr) <= eta) return y;
  // exit only from the feasible (s <= eta) side so the result never
  // violates the budget
  double lo = 0.0, hi = norm1(y);
  Vec out(y.size());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = eval(mid, &out);
    if (s > eta) {
      lo = mid;
    } else {
      hi = mid;
      if (eta - s <= tol * (1.0 + eta)) return out;
    }
    if (hi - lo <= 1e-16 * (1.0 + hi)) break;
  }
  eval(hi, &out);
  return out;
}

}  // namespace epiprox
