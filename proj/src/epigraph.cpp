#include "epiprox/epigraph.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <thread>

namespace epiprox {

Vec project_simple_set(const SimpleSet& set, const Vec& y) {
  return std::visit(
      [&](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return s.c;
        } else if constexpr (std::is_same_v<T, Ball2Set>) {
          Vec d = y - s.center;
          const double n = norm2(d);
          if (n <= s.radius) return y;
          Vec out = s.center;
          axpy(s.radius / n, d, out);
          return out;
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          Vec out = y;
          for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::clamp(out[i], s.lo[i], s.hi[i]);
          return out;
        } else {
          return s.projector.apply(y);
        }
      },
      set);
}

double dist_to_simple_set(const SimpleSet& set, const Vec& y) {
  return norm2(y - project_simple_set(set, y));
}

int kind_dim_or_any(const EpiKind& kind) {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, WeightedInfNorm>)
          return static_cast<int>(k.taus.size());
        else if constexpr (std::is_same_v<T, ScalarPower>)
          return 1;
        else
          return -1;
      },
      kind);
}

double kind_value(const EpiKind& kind, std::span<const double> y) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, EuclideanNorm>) {
          return k.tau * norm2(y);
        } else if constexpr (std::is_same_v<T, WeightedInfNorm>) {
          double m = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i)
            m = std::max(m, std::abs(y[i]) / k.taus[i]);
          return m;
        } else if constexpr (std::is_same_v<T, DistanceToSet>) {
          return k.tau *
                 std::pow(dist_to_simple_set(k.set, Vec(y.begin(), y.end())),
                          k.beta);
        } else {
          return k.tau * std::pow(std::abs(y[0]), k.beta);
        }
      },
      kind);
}

EpiPoint project_epi_l2(double tau, const Vec& y, double zeta) {
  if (!(tau > 0.0)) throw std::invalid_argument("project_epi_l2: tau > 0");
  const double ny = norm2(y);
  if (ny == 0.0) return {Vec(y.size(), 0.0), std::max(zeta, 0.0)};
  if (ny < -tau * zeta) return {Vec(y.size(), 0.0), 0.0};
  if (ny < zeta / tau) return {y, zeta};
  const double alpha = (1.0 + tau * zeta / ny) / (1.0 + tau * tau);
  EpiPoint out{alpha * Vec(y), alpha * tau * ny};
  return out;
}

EpiPoint project_epi_linf(const Vec& taus, const Vec& y, double zeta) {
  const std::size_t m = y.size();
  if (taus.size() != m)
    throw std::invalid_argument("project_epi_linf: size mismatch");
  for (double t : taus)
    if (!(t > 0.0)) throw std::invalid_argument("project_epi_linf: taus > 0");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  Vec nu(m);
  for (std::size_t i = 0; i < m; ++i) nu[i] = std::abs(y[i]) / taus[i];
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return nu[a] < nu[b]; });
  // Suffix sums of ν·τ² and τ² in ascending ν order.
  Vec s_nt(m + 1, 0.0), s_t(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    const int j = order[i];
    s_nt[i] = s_nt[i + 1] + nu[j] * taus[j] * taus[j];
    s_t[i] = s_t[i + 1] + taus[j] * taus[j];
  }
  // Water-filling scan: the optimality condition θ − ζ = Σ τ²(ν − θ)₊ is
  // piecewise linear and increasing in θ, so the first segment whose
  // candidate does not exceed its upper breakpoint holds the root. (The
  // lower breakpoint is then satisfied automatically; testing both sides
  // strictly is fragile under ties among the ν values.)
  double theta = std::max(zeta, 0.0);  // mb = m fallback: θ = ζ
  for (std::size_t mb = 0; mb <= m; ++mb) {  // mb = m̄ − 1 (0-based)
    const double cand = (zeta + s_nt[mb]) / (1.0 + s_t[mb]);
    const double hi = (mb == m) ? std::numeric_limits<double>::infinity()
                                : nu[order[mb]];
    if (cand <= hi) {
      theta = std::max(cand, 0.0);
      break;
    }
  }
  Vec p(m);
  for (std::size_t i = 0; i < m; ++i)
    p[i] = std::clamp(y[i], -taus[i] * theta, taus[i] * theta);
  return {std::move(p), theta};
}

EpiPoint project_epi_dist(double tau, double beta, const SimpleSet& set,
                          const Vec& y, double zeta) {
  if (!(tau > 0.0) || !(beta >= 1.0))
    throw std::invalid_argument("project_epi_dist: bad parameters");
  const Vec pc = project_simple_set(set, y);
  const double d = norm2(y - pc);
  if (d == 0.0) return {y, std::max(zeta, 0.0)};
  const double alpha =
      prox_power_max_sq(PowerProxParams{tau, beta, zeta}, d) / d;
  Vec p = pc;
  axpy(alpha, y - pc, p);
  const double dp = alpha * d;  // p is on the segment [P_C(y), y]
  return {std::move(p), std::max(tau * std::pow(dp, beta), zeta)};
}

std::pair<double, double> project_epi_generic_scalar(
    const PowerProxParams& params, double y, double zeta) {
  PowerProxParams pp = params;
  pp.zeta = zeta;
  const double p = prox_power_max_sq(pp, y);
  const double theta =
      std::max(params.tau * std::pow(std::abs(p), params.beta), zeta);
  return {p, theta};
}

EpiPoint project_epi(const EpiKind& kind, const Vec& y, double zeta) {
  return std::visit(
      [&](const auto& k) -> EpiPoint {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, EuclideanNorm>) {
          return project_epi_l2(k.tau, y, zeta);
        } else if constexpr (std::is_same_v<T, WeightedInfNorm>) {
          return project_epi_linf(k.taus, y, zeta);
        } else if constexpr (std::is_same_v<T, DistanceToSet>) {
          return project_epi_dist(k.tau, k.beta, k.set, y, zeta);
        } else {
          if (y.size() != 1)
            throw std::invalid_argument("ScalarPower: dim 1 required");
          auto [p, theta] = project_epi_generic_scalar(
              PowerProxParams{k.tau, k.beta, 0.0}, y[0], zeta);
          return {Vec{p}, theta};
        }
      },
      kind);
}

EpiState project_epi_stack(const BlockLayout& layout,
                           const std::vector<EpiKind>& kinds, EpiState s,
                           int threads) {
  const int L = layout.num_blocks();
  if (static_cast<int>(kinds.size()) != L)
    throw std::invalid_argument("project_epi_stack: kinds/layout mismatch");
  const auto off = layout.offsets();
  if (static_cast<int>(s.y.size()) != off[L] ||
      static_cast<int>(s.zeta.size()) != L)
    throw std::invalid_argument("project_epi_stack: state size mismatch");
  for (int l = 0; l < L; ++l) {
    const int want = kind_dim_or_any(kinds[l]);
    if (want >= 0 && want != layout.block_size(l))
      throw std::invalid_argument("project_epi_stack: kind/block dim");
  }
  auto work = [&](int lo, int hi) {
    for (int l = lo; l < hi; ++l) {
      Vec blk(s.y.begin() + off[l], s.y.begin() + off[l + 1]);
      EpiPoint r = project_epi(kinds[l], blk, s.zeta[l]);
      std::copy(r.p.begin(), r.p.end(), s.y.begin() + off[l]);
      s.zeta[l] = r.theta;
    }
  };
  if (threads <= 1 || L < 4 * threads) {
    work(0, L);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (L + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk, hi = std::min(L, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return s;
}

}  // namespace epiprox
