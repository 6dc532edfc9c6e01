#include "epiprox/oracles.hpp"

#include <algorithm>

namespace epiprox::oracle {

std::vector<Vec> dense_matrix(const LinOp& op) {
  std::vector<Vec> m(op.out_dim, Vec(op.in_dim, 0.0));
  Vec e(op.in_dim, 0.0);
  for (int j = 0; j < op.in_dim; ++j) {
    e[j] = 1.0;
    Vec col = op.apply(e);
    for (int i = 0; i < op.out_dim; ++i) m[i][j] = col[i];
    e[j] = 0.0;
  }
  return m;
}

Vec dense_apply(const std::vector<Vec>& m, const Vec& x) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], x);
  return out;
}

Vec dense_adjoint_apply(const std::vector<Vec>& m, const Vec& x) {
  Vec out(m.empty() ? 0 : m[0].size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += m[i][j] * x[i];
  return out;
}

namespace {

// Projection of y onto the level set {p : h(p) ≤ theta}, theta ≥ 0.
Vec level_set_project(const EpiKind& kind, const Vec& y, double theta) {
  return std::visit(
      [&](const auto& k) -> Vec {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, EuclideanNorm>) {
          const double r = theta / k.tau;
          const double n = norm2(y);
          if (n <= r) return y;
          return (r / n) * Vec(y);
        } else if constexpr (std::is_same_v<T, WeightedInfNorm>) {
          Vec p = y;
          for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = std::clamp(p[i], -k.taus[i] * theta, k.taus[i] * theta);
          return p;
        } else if constexpr (std::is_same_v<T, DistanceToSet>) {
          const double r = std::pow(theta / k.tau, 1.0 / k.beta);
          const Vec pc = project_simple_set(k.set, y);
          const double d = norm2(y - pc);
          if (d <= r) return y;
          Vec p = pc;
          axpy(r / d, y - pc, p);
          return p;
        } else {
          const double r = std::pow(theta / k.tau, 1.0 / k.beta);
          return Vec{std::clamp(y[0], -r, r)};
        }
      },
      kind);
}

}  // namespace

EpiPoint project_epi_numeric(const EpiKind& kind, const Vec& y, double zeta) {
  const double hy = kind_value(kind, y);
  if (hy <= zeta) return {y, zeta};
  // g(θ) = dist²(y, lev_θ) + (θ − ζ)² is convex on θ ≥ 0.
  auto g = [&](double theta) {
    const Vec p = level_set_project(kind, y, theta);
    const double d = norm2(y - p);
    return d * d + (theta - zeta) * (theta - zeta);
  };
  const double hi0 = std::max(0.0, zeta) + std::max(hy, 0.0) + 1.0;
  const double theta = minimize_scalar(g, 0.0, hi0, 4001, 200);
  return {level_set_project(kind, y, theta), theta};
}

Vec dykstra(const std::vector<std::function<Vec(const Vec&)>>& projectors,
            Vec x, int iters, double tol) {
  const std::size_t K = projectors.size();
  std::vector<Vec> incr(K, Vec(x.size(), 0.0));
  for (int it = 0; it < iters; ++it) {
    Vec prev = x;
    // the iterate can repeat for a whole sweep while the increments are
    // still moving, so the stop test must watch both
    double dincr = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      Vec w = x + incr[k];
      Vec p = projectors[k](w);
      Vec next = w - p;
      dincr += norm2(next - incr[k]);
      incr[k] = std::move(next);
      x = std::move(p);
    }
    if (norm2(x - prev) + dincr <= tol * (1.0 + norm2(x))) break;
  }
  return x;
}

Vec alternating_projections(
    const std::vector<std::function<Vec(const Vec&)>>& projectors, Vec x,
    int iters, double tol) {
  for (int it = 0; it < iters; ++it) {
    Vec prev = x;
    for (const auto& proj : projectors) x = proj(x);
    if (tol > 0.0 && norm2(x - prev) <= tol * (1.0 + norm2(x))) break;
  }
  return x;
}

double minimize_scalar(const std::function<double(double)>& f, double lo,
                       double hi, int grid, int refine_rounds) {
  double best_x = lo, best_f = f(lo);
  const double step = (hi - lo) / (grid - 1);
  for (int i = 1; i < grid; ++i) {
    const double x = lo + i * step;
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double radius = step;
  for (int r = 0; r < refine_rounds; ++r) {
    const double a = std::max(lo, best_x - radius);
    const double b = std::min(hi, best_x + radius);
    for (int i = 0; i <= 16; ++i) {
      const double x = a + (b - a) * i / 16.0;
      const double fx = f(x);
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
    }
    radius *= 0.4;
  }
  return best_x;
}

}  // namespace epiprox::oracle
