#include "epiprox/pulse.hpp"

#include <algorithm>
#include <cmath>

#include "epiprox/oracles.hpp"

namespace epiprox {

namespace {

bool near_integer(double v, double tol = 1e-9) {
  return std::abs(v - std::round(v)) <= tol * (1.0 + std::abs(v));
}

int smallest_admissible_n(const PulseSpec& spec) {
  for (int n = 2; n <= (1 << 22); n += 2) {
    if (near_integer(spec.mask_above_hz * n / spec.fs) &&
        near_integer(spec.null_every_hz * n / spec.fs) &&
        near_integer(spec.zero_every_ms * spec.fs / 1000.0) &&
        near_integer(spec.duration_ms * spec.fs / 1000.0))
      return n;
  }
  return 0;
}

// DFT rows for the given bins: (Re χ_k, Im χ_k) pairs, unitary scaling.
LinOp restrict_dft(int n, const std::vector<int>& bins) {
  std::vector<std::uint8_t> mask(2 * n, 0);
  for (int k : bins) {
    mask[2 * k] = 1;
    mask[2 * k + 1] = 1;
  }
  return compose(make_decimation(mask), make_unitary_dft(n));
}

// Block-diagonal stack of an operator on x with the identity on ζ.
LinOp augment_with_identity(const LinOp& op, int extra) {
  LinOp out;
  out.in_dim = op.in_dim + extra;
  out.out_dim = op.out_dim + extra;
  const int n = op.in_dim, m = op.out_dim;
  out.apply = [op, n, m, extra](const Vec& v) {
    Vec y = op.apply(Vec(v.begin(), v.begin() + n));
    y.resize(m + extra);
    std::copy(v.begin() + n, v.end(), y.begin() + m);
    return y;
  };
  out.adjoint = [op, n, m, extra](const Vec& v) {
    Vec x = op.adjoint(Vec(v.begin(), v.begin() + m));
    x.resize(n + extra);
    std::copy(v.begin() + m, v.end(), x.begin() + n);
    return x;
  };
  out.norm_bound = std::max(op.norm_bound, 1.0);
  return out;
}

// Extends an operator on x to the augmented primal (x, ζ), ignoring ζ.
LinOp on_x_part(const LinOp& op, int extra) {
  if (extra == 0) return op;
  LinOp out;
  out.in_dim = op.in_dim + extra;
  out.out_dim = op.out_dim;
  const int n = op.in_dim;
  out.apply = [op, n](const Vec& v) {
    return op.apply(Vec(v.begin(), v.begin() + n));
  };
  out.adjoint = [op, n, extra](const Vec& v) {
    Vec x = op.adjoint(v);
    x.resize(n + extra, 0.0);
    return x;
  };
  out.norm_bound = op.norm_bound;
  return out;
}

struct HardSets {
  std::vector<int> d3;
  int n = 0;

  // Joint projection onto the symmetric subspace with unit center and time
  // zeros (D3 is symmetric about the center, so the factors commute).
  Vec project(Vec x) const {
    for (int t : d3) x[t] = 0.0;
    const int c = n / 2;
    for (int j = 1; j < c; ++j) {
      const double m = 0.5 * (x[c + j] + x[c - j]);
      x[c + j] = m;
      x[c - j] = m;
    }
    x[c] = 1.0;
    return x;
  }
};

// Orthogonal projection onto {x : χ(D2) = 0}: zero the selected bins and
// their conjugate mirrors in the unitary transform domain.
struct NullProjector {
  LinOp dft;  // full unitary packed DFT
  std::vector<std::uint8_t> zero2n;

  Vec project(const Vec& x) const {
    Vec spec = dft.apply(x);
    for (std::size_t i = 0; i < spec.size(); ++i)
      if (zero2n[i]) spec[i] = 0.0;
    return dft.adjoint(spec);
  }
};

double sum_dist_beta(const LinOp& r1, const Vec& x, double gamma, double beta) {
  Vec spec = r1.apply(x);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < spec.size(); i += 2) {
    const double mag = std::hypot(spec[i], spec[i + 1]);
    s += std::pow(std::max(mag - gamma, 0.0), beta);
  }
  return s;
}

}  // namespace

PulseIndexSets build_index_sets(const PulseSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const double bin_hz = spec.fs / n;
  if (!near_integer(spec.mask_above_hz / bin_hz) ||
      !near_integer(spec.null_every_hz / bin_hz) ||
      !near_integer(spec.zero_every_ms * spec.fs / 1000.0) ||
      !near_integer(spec.duration_ms * spec.fs / 1000.0)) {
    const int admissible = smallest_admissible_n(spec);
    throw std::invalid_argument(
        "pulse grid incommensurate with n = " + std::to_string(n) +
        "; smallest admissible n is " + std::to_string(admissible));
  }
  PulseIndexSets sets;
  for (int k = 1; k <= n / 2; ++k)
    if (k * bin_hz > spec.mask_above_hz + 1e-9) sets.d1.push_back(k);
  sets.d2.push_back(0);
  for (int k = 1; k <= n / 2; ++k)
    if (near_integer(k * bin_hz / spec.null_every_hz)) sets.d2.push_back(k);
  const int dur = static_cast<int>(
      std::llround(spec.duration_ms * spec.fs / 1000.0));
  const int step = static_cast<int>(
      std::llround(spec.zero_every_ms * spec.fs / 1000.0));
  const int c = n / 2, half = dur / 2;
  for (int t = 0; t < n; ++t) {
    const int d = std::abs(t - c);
    if (d > half || (d > 0 && d % step == 0)) sets.d3.push_back(t);
  }
  return sets;
}

PulseResult design_pulse(const PulseSpec& spec, const SolverConfig& config,
                         int threads) {
  PulseIndexSets sets = build_index_sets(spec);
  const int n = spec.n;
  const double gamma = spec.mask_limit;
  HardSets hard{sets.d3, n};
  LinOp r2 = restrict_dft(n, sets.d2);
  LinOp r1 = sets.d1.empty() ? LinOp{} : restrict_dft(n, sets.d1);

  // Core solve; mu <= 0 drops the energy ball, include_c1 = false drops the
  // relaxed mask term (and its ζ variables) entirely.
  auto solve_core = [&](double mu, bool include_c1, double epsilon) {
    const int L = include_c1 ? static_cast<int>(sets.d1.size()) : 0;
    SolverProblem prob;
    prob.dim = n + L;
    prob.smooth.value = [n](const Vec& v) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += v[i] * v[i];
      return s;
    };
    prob.smooth.gradient = [n, L](const Vec& v) {
      Vec g(n + L, 0.0);
      for (int i = 0; i < n; ++i) g[i] = 2.0 * v[i];
      return g;
    };
    prob.smooth.lipschitz = 2.0;
    const HalfSpace hs{L, epsilon};
    prob.primal_project = [hard, hs, n, L](Vec v) {
      Vec x = hard.project(Vec(v.begin(), v.begin() + n));
      std::copy(x.begin(), x.end(), v.begin());
      if (L > 0) {
        Vec zeta(v.begin() + n, v.end());
        zeta = project_halfspace(hs, std::move(zeta));
        std::copy(zeta.begin(), zeta.end(), v.begin() + n);
      }
      return v;
    };
    prob.dual_terms.push_back(
        {on_x_part(r2, L), [](const Vec& v) { return Vec(v.size(), 0.0); }});
    if (mu > 0.0)
      prob.dual_terms.push_back(
          {on_x_part(identity_op(n), L),
           [mu](const Vec& v) { return project_l2_ball(mu, v); }});
    Vec x0 = prob.primal_project(Vec(n + L, 0.0));
    if (include_c1) {
      DecomposableConstraint c1;
      c1.layout = BlockLayout::uniform(2 * L, 2);
      c1.kinds.assign(
          L, DistanceToSet{1.0, spec.beta, Ball2Set{{0.0, 0.0}, gamma}});
      c1.eta = epsilon;
      auto sc = split(c1, BudgetForm::Inequality, threads);
      auto epi = sc.epi_projector;
      const int m = r1.out_dim;
      prob.dual_terms.push_back(
          {augment_with_identity(r1, L), [epi, m](const Vec& v) {
             EpiState s{Vec(v.begin(), v.begin() + m),
                        Vec(v.begin() + m, v.end())};
             s = epi(std::move(s));
             Vec out = std::move(s.y);
             out.insert(out.end(), s.zeta.begin(), s.zeta.end());
             return out;
           }});
      // ζ₀: each block's distance to the disk, budget-shifted.
      Vec zeta0 =
          init_zeta(c1, r1.apply(Vec(x0.begin(), x0.begin() + n)));
      std::copy(zeta0.begin(), zeta0.end(), x0.begin() + n);
      x0 = prob.primal_project(std::move(x0));
    }
    return solve(prob, std::move(x0), config);
  };

  // Hard-constraint preflight: the mask relaxation and the ε budget cannot
  // make C₂ ∩ C₃ ∩ C₄ ∩ C₅ feasible, so check that intersection first.
  NullProjector nulls;
  nulls.dft = make_unitary_dft(n);
  nulls.zero2n.assign(2 * n, 0);
  for (int k : sets.d2) {
    nulls.zero2n[2 * k] = 1;
    nulls.zero2n[2 * k + 1] = 1;
    const int mirror = (n - k) % n;
    nulls.zero2n[2 * mirror] = 1;
    nulls.zero2n[2 * mirror + 1] = 1;
  }

  PulseResult res;
  res.report.beta = spec.beta;
  res.report.epsilon = spec.epsilon;

  double mu = spec.energy_mu;
  if (!(mu > 0.0)) {
    SolveResult base = solve_core(0.0, false, 0.0);
    mu = 1.1 * norm2(std::span<const double>(base.x.data(), n));
    if (!(mu > 0.0)) mu = 1.0;
  }
  res.report.energy_mu = mu;

  std::vector<std::function<Vec(const Vec&)>> hard_projs{
      [hard](const Vec& v) { return hard.project(Vec(v)); },
      [nulls](const Vec& v) { return nulls.project(v); },
      [mu](const Vec& v) { return project_l2_ball(mu, Vec(v)); }};
  Vec probe = hard.project(Vec(n, 0.0));
  probe = oracle::alternating_projections(hard_projs, std::move(probe), 2000,
                                          1e-13);
  {
    const Vec a = hard.project(Vec(probe));
    const Vec b = nulls.project(probe);
    const Vec c = project_l2_ball(mu, Vec(probe));
    res.report.preflight_residual =
        norm2(a - probe) + norm2(b - probe) + norm2(c - probe);
    res.report.feasible = res.report.preflight_residual <= 1e-6;
  }
  if (!res.report.feasible) return res;

  // Feasible witness with small mask excess: projected subgradient steps on
  // Σ d^β over the hard intersection, each followed by a projection sweep,
  // then a long polish. Its Σ d^β upper-bounds the smallest budget ε for
  // which the relaxed problem is still feasible, and anchors the default ε.
  double witness_sum =
      sets.d1.empty() ? 0.0 : sum_dist_beta(r1, probe, gamma, spec.beta);
  Vec xw = probe;
  if (!sets.d1.empty()) {
    Vec x = probe;
    for (int it = 0; it < 250; ++it) {
      Vec sp = r1.apply(x);
      Vec g(sp.size(), 0.0);
      for (std::size_t i = 0; i + 1 < sp.size(); i += 2) {
        const double mag = std::hypot(sp[i], sp[i + 1]);
        const double dist = mag - gamma;
        if (dist > 1e-15) {
          const double coef =
              spec.beta * std::pow(dist, spec.beta - 1.0) / mag;
          g[i] = coef * sp[i];
          g[i + 1] = coef * sp[i + 1];
        }
      }
      Vec xg = r1.adjoint(g);
      const double gn = norm2(xg);
      if (gn <= 1e-14) break;
      const double t = 0.25 * mu / (gn * std::sqrt(it + 1.0));
      for (int i = 0; i < n; ++i) x[i] -= t * xg[i];
      x = oracle::alternating_projections(hard_projs, std::move(x), 40, 1e-12);
      const double s = sum_dist_beta(r1, x, gamma, spec.beta);
      if (s < witness_sum) {
        witness_sum = s;
        xw = x;
      }
    }
    xw = oracle::alternating_projections(hard_projs, std::move(xw), 2000,
                                         1e-13);
    witness_sum = sum_dist_beta(r1, xw, gamma, spec.beta);
  }
  res.report.sum_dist_witness = witness_sum;
  double epsilon = spec.epsilon;
  if (!(epsilon > 0.0)) epsilon = std::max(1.05 * witness_sum, 1e-12);
  res.report.epsilon = epsilon;

  SolveResult sr = solve_core(mu, !sets.d1.empty(), epsilon);
  res.x.assign(sr.x.begin(), sr.x.begin() + n);
  // The primal limit satisfies the hard sets only asymptotically; report its
  // exact projection onto C₄ ∩ C₅ ∩ ball so membership holds to roundoff.
  res.x = oracle::dykstra(
      {hard_projs[0], hard_projs[2]}, std::move(res.x), 2000, 1e-14);
  // The dualized budget is met only in the limit; when the iterate overshoots
  // ε, blend toward the feasible witness (Σ d^β is convex and every other set
  // is convex and contains both endpoints), just enough to restore ε.
  if (!sets.d1.empty()) {
    const double sumd = sum_dist_beta(r1, res.x, gamma, spec.beta);
    if (sumd > epsilon && witness_sum < epsilon) {
      const double t =
          std::min(1.0, (sumd - epsilon) / (sumd - witness_sum));
      for (int i = 0; i < n; ++i) res.x[i] += t * (xw[i] - res.x[i]);
    }
  }
  res.report.trace = std::move(sr.trace);
  res.report.iters = res.report.trace.iters;
  res.report.converged = res.report.trace.converged;
  res.report.norm_x = norm2(res.x);
  res.report.objective = res.report.norm_x * res.report.norm_x;
  res.report.sum_dist_beta =
      sets.d1.empty() ? 0.0 : sum_dist_beta(r1, res.x, gamma, spec.beta);
  res.report.c1_inactive = res.report.sum_dist_beta <= 0.99 * epsilon;
  res.report.residual_nulls = norm2(r2.apply(res.x));
  res.report.residual_zeros = norm2(hard.project(Vec(res.x)) - res.x);
  res.report.residual_energy = std::max(res.report.norm_x - mu, 0.0);
  return res;
}

std::vector<SpectrumRow> spectrum_report(const Vec& x, const PulseSpec& spec) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.n)
    throw std::invalid_argument("spectrum_report: size mismatch");
  PulseIndexSets sets = build_index_sets(spec);
  std::vector<std::uint8_t> in_d1(spec.n / 2 + 1, 0);
  for (int k : sets.d1) in_d1[k] = 1;
  LinOp dft = make_unitary_dft(spec.n);
  Vec s = dft.apply(x);
  std::vector<SpectrumRow> rows(spec.n);
  for (int k = 0; k < spec.n; ++k) {
    rows[k].bin = k;
    rows[k].hz = k * spec.fs / spec.n;
    rows[k].magnitude = std::hypot(s[2 * k], s[2 * k + 1]);
    const int kk = std::min(k, spec.n - k);
    rows[k].mask_excess =
        (kk <= spec.n / 2 && k <= spec.n / 2 && in_d1[k])
            ? std::max(rows[k].magnitude - spec.mask_limit, 0.0)
            : 0.0;
  }
  return rows;
}

}  // namespace epiprox
