#include "epiprox/solver.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace epiprox {

double step_constant(const SolverProblem& problem) {
  double sq = 0.0;
  for (const auto& t : problem.dual_terms)
    sq += t.op.norm_bound * t.op.norm_bound;
  return problem.smooth.lipschitz + std::max(std::sqrt(sq), 1.0);
}

double objective_value(const SolverProblem& problem, const Vec& x) {
  return problem.smooth.value ? problem.smooth.value(x) : 0.0;
}

Vec constraint_violations(const SolverProblem& problem, const Vec& x) {
  Vec v;
  v.reserve(problem.dual_terms.size());
  for (const auto& t : problem.dual_terms) {
    Vec hx = t.op.apply(x);
    v.push_back(norm2(hx - t.project(hx)));
  }
  return v;
}

std::pair<double, Vec> objective_and_violations(const SolverProblem& problem,
                                                const Vec& x) {
  return {objective_value(problem, x), constraint_violations(problem, x)};
}

SolveResult solve(const SolverProblem& problem, Vec x0,
                  const SolverConfig& config) {
  config.validate();
  if (static_cast<int>(x0.size()) != problem.dim)
    throw std::invalid_argument("solve: x0 dimension mismatch");
  const double theta = step_constant(problem);
  const double eps =
      std::min(config.epsilon_margin, 0.5 / (theta + 1.0));
  const double gamma = config.gamma_fraction * (1.0 - eps) / theta;

  const std::size_t K = problem.dual_terms.size();
  Vec x = std::move(x0);
  std::vector<Vec> v(K);
  for (std::size_t k = 0; k < K; ++k)
    v[k].assign(problem.dual_terms[k].op.out_dim, 0.0);

  SolveResult res;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  for (int it = 0; it < config.max_iters; ++it) {
    // Forward step on the primal.
    Vec drift = problem.smooth.gradient(x);
    for (std::size_t k = 0; k < K; ++k) {
      Vec back = problem.dual_terms[k].op.adjoint(v[k]);
      axpy(1.0, back, drift);
    }
    Vec xhat = x;
    axpy(-gamma, drift, xhat);
    Vec p = problem.primal_project(std::move(xhat));
    // xhat was moved; rebuild it for the correction step.
    xhat = x;
    axpy(-gamma, drift, xhat);

    // Dual resolvents and updates.
    std::vector<Vec> a(K);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& term = problem.dual_terms[k];
      Vec vhat = v[k];
      axpy(gamma, term.op.apply(x), vhat);
      Vec proj = term.project((1.0 / gamma) * Vec(vhat));
      a[k] = vhat;
      axpy(-gamma, proj, a[k]);
      Vec corr = term.op.apply(p - x);
      v[k] = a[k];
      axpy(gamma, corr, v[k]);
    }

    // Backward-forward correction on the primal.
    Vec drift2 = problem.smooth.gradient(p);
    for (std::size_t k = 0; k < K; ++k) {
      Vec back = problem.dual_terms[k].op.adjoint(a[k]);
      axpy(1.0, back, drift2);
    }
    Vec xtilde = p;
    axpy(-gamma, drift2, xtilde);

    Vec xnew = x - xhat + xtilde;
    if (!all_finite(xnew))
      throw std::runtime_error("solve: non-finite iterate at iteration " +
                               std::to_string(it));

    const double nx = norm2(x);
    const double rel = norm2(xnew - x) / std::max(nx, 1e-300);
    x = std::move(xnew);
    res.trace.iters = it + 1;

    if (config.trace_every > 0 && (it % config.trace_every == 0)) {
      TraceRow row;
      row.iter = it + 1;
      row.time_s = elapsed();
      row.rel_change = rel;
      row.objective = objective_value(problem, x);
      row.violations = constraint_violations(problem, x);
      res.trace.rows.push_back(std::move(row));
    }
    if (rel <= config.stop_rel) {
      res.trace.converged = true;
      break;
    }
  }
  res.trace.wall_time_s = elapsed();
  res.x = std::move(x);
  return res;
}

void write_trace_csv(const SolverTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const std::size_t K = trace.rows.empty() ? 0 : trace.rows[0].violations.size();
  out << "iter,time_s,rel_change,objective";
  for (std::size_t k = 1; k <= K; ++k) out << ",violation_" << k;
  out << "\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : trace.rows) {
    out << r.iter << ',' << num(r.time_s) << ',' << num(r.rel_change) << ','
        << num(r.objective);
    for (double v : r.violations) out << ',' << num(v);
    out << "\n";
  }
}

}  // namespace epiprox
