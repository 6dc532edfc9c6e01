#include "epiprox/prox.hpp"

#include <algorithm>

namespace epiprox {

namespace {

// Left-hand side of the root equation βτ²χ^{2β−1} − βτζχ^{β−1} + χ = |y|.
double root_lhs(double tau, double beta, double zeta, double chi) {
  return beta * tau * tau * std::pow(chi, 2.0 * beta - 1.0) -
         beta * tau * zeta * std::pow(chi, beta - 1.0) + chi;
}

double root_lhs_deriv(double tau, double beta, double zeta, double chi) {
  return beta * (2.0 * beta - 1.0) * tau * tau *
             std::pow(chi, 2.0 * beta - 2.0) -
         beta * (beta - 1.0) * tau * zeta * std::pow(chi, beta - 2.0) + 1.0;
}

// Safeguarded bisection + Newton on [lo, hi]; the lhs is strictly increasing
// on the brackets used by the caller.
double solve_root(double tau, double beta, double zeta, double target,
                  double lo, double hi) {
  const double tol = 1e-12 * (1.0 + std::abs(target));
  double chi = 0.5 * (lo + hi);
  // The cap is generous because for beta close to 1 the root can sit below
  // the subnormal range, and only repeated halving drives the bracket to 0.
  for (int it = 0; it < 1200; ++it) {
    const double f = root_lhs(tau, beta, zeta, chi) - target;
    if (std::abs(f) <= tol) return chi;
    if (f > 0.0)
      hi = chi;
    else
      lo = chi;
    if (hi - lo <= 1e-17 * hi) return chi;  // bracket exhausted in doubles
    const double df = root_lhs_deriv(tau, beta, zeta, chi);
    double next = chi - f / df;
    if (!std::isfinite(next) || next <= lo || next >= hi)
      next = 0.5 * (lo + hi);
    chi = next;
  }
  return chi;
}

}  // namespace

double prox_power_max_sq(const PowerProxParams& params, double y) {
  params.validate();
  const double tau = params.tau, beta = params.beta, zeta = params.zeta;
  const double ay = std::abs(y);
  const double sgn = (y < 0.0) ? -1.0 : 1.0;
  if (zeta <= 0.0) {
    if (beta == 1.0)
      return sgn / (1.0 + tau * tau) * std::max(ay + tau * zeta, 0.0);
    if (ay == 0.0) return 0.0;
    return sgn * solve_root(tau, beta, zeta, ay, 0.0, ay);
  }
  // zeta > 0: identity inside the level set.
  if (tau * std::pow(ay, beta) <= zeta) return y;
  if (beta == 1.0) return sgn * (ay + tau * zeta) / (1.0 + tau * tau);
  const double lo = std::pow(zeta / tau, 1.0 / beta);
  return sgn * solve_root(tau, beta, zeta, ay, lo, ay);
}

Vec project_box(const Box& box, Vec x) {
  box.validate();
  for (double& v : x) v = std::clamp(v, box.lo, box.hi);
  return x;
}

Vec project_halfspace(const HalfSpace& hs, Vec z) {
  if (static_cast<int>(z.size()) != hs.dim)
    throw std::invalid_argument("project_halfspace: dimension mismatch");
  double s = 0.0;
  for (double v : z) s += v;
  if (s <= hs.eta) return z;
  const double corr = (s - hs.eta) / hs.dim;
  for (double& v : z) v -= corr;
  return z;
}

Vec project_hyperplane(const HalfSpace& hs, Vec z) {
  if (static_cast<int>(z.size()) != hs.dim)
    throw std::invalid_argument("project_hyperplane: dimension mismatch");
  double s = 0.0;
  for (double v : z) s += v;
  const double corr = (s - hs.eta) / hs.dim;
  for (double& v : z) v -= corr;
  return z;
}

Vec project_l2_ball(double radius, Vec x) {
  if (!(radius > 0.0)) throw std::invalid_argument("l2_ball: radius > 0");
  const double n = norm2(x);
  if (n <= radius) return x;
  const double s = radius / n;
  for (double& v : x) v *= s;
  return x;
}

Vec project_l1_ball(double radius, const Vec& x) {
  if (!(radius > 0.0)) throw std::invalid_argument("l1_ball: radius > 0");
  if (norm1(x) <= radius) return x;
  Vec a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  // Largest k with a_k > (prefix_k - radius)/k gives the threshold.
  double prefix = 0.0, lambda = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    prefix += a[k];
    const double cand = (prefix - radius) / static_cast<double>(k + 1);
    if (a[k] > cand)
      lambda = cand;
    else
      break;
  }
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = std::max(std::abs(x[i]) - lambda, 0.0);
    out[i] = (x[i] < 0.0) ? -m : m;
  }
  return out;
}

}  // namespace epiprox
