#pragma once

#include <functional>

#include "epiprox/linop.hpp"

namespace epiprox {

struct SmoothTerm {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  double lipschitz = 0.0;
};

// A constraint H x ∈ C handled through its dual variable.
struct DualTerm {
  LinOp op;
  std::function<Vec(const Vec&)> project;
};

struct SolverProblem {
  int dim = 0;  // augmented primal dimension
  SmoothTerm smooth;
  std::function<Vec(Vec)> primal_project;  // exact projection onto C₂ × V₁
  std::vector<DualTerm> dual_terms;
};

struct SolverConfig {
  int max_iters = 20000;
  double stop_rel = 1e-4;
  double gamma_fraction = 0.9;   // position inside [ε, (1−ε)/θ]
  double epsilon_margin = 1e-6;  // the ε of the admissible step interval
  std::uint64_t seed = 0;
  int trace_every = 1;  // 0 disables per-iteration records

  void validate() const {
    if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0))
      throw std::invalid_argument("SolverConfig: gamma_fraction in (0,1)");
    if (max_iters < 1)
      throw std::invalid_argument("SolverConfig: max_iters >= 1");
  }
};

struct TraceRow {
  int iter = 0;
  double time_s = 0.0;
  double rel_change = 0.0;
  double objective = 0.0;
  Vec violations;
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  int iters = 0;
  double wall_time_s = 0.0;
};

struct SolveResult {
  Vec x;
  SolverTrace trace;
};

// θ = Lipschitz constant of the smooth gradient plus max(combined norm bound
// of the stacked dual operators, 1).
double step_constant(const SolverProblem& problem);

double objective_value(const SolverProblem& problem, const Vec& x);

// Per-dual-term distances ‖Hx − P_C(Hx)‖.
Vec constraint_violations(const SolverProblem& problem, const Vec& x);

std::pair<double, Vec> objective_and_violations(const SolverProblem& problem,
                                                const Vec& x);

// Monotone+Lipschitz forward-backward-forward primal-dual iteration with a
// constant step γ = gamma_fraction·(1−ε)/θ. Throws on non-finite iterates.
SolveResult solve(const SolverProblem& problem, Vec x0,
                  const SolverConfig& config);

void write_trace_csv(const SolverTrace& trace, const std::string& path);

}  // namespace epiprox
