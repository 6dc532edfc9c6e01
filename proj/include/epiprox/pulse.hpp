#pragma once

#include "epiprox/constraints.hpp"
#include "epiprox/solver.hpp"

namespace epiprox {

struct PulseSpec {
  int n = 512;                   // pulse length, samples (even)
  double fs = 2560.0;            // sampling rate, Hz
  double mask_limit = 0.0316227766016838;  // γ = 10^{-3/2}
  double mask_above_hz = 300.0;
  double null_every_hz = 50.0;
  double energy_mu = 0.0;        // <= 0: derived as 1.1× the C1-free norm
  double zero_every_ms = 3.125;
  double duration_ms = 50.0;
  double beta = 1.0;
  double epsilon = 0.0;  // relaxation budget ε; <= 0: derived from a
                         // feasible witness at startup

  void validate() const {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("PulseSpec: n even >= 4");
    if (!(fs > 0.0 && mask_limit > 0.0 && null_every_hz > 0.0 &&
          zero_every_ms > 0.0 && duration_ms > 0.0))
      throw std::invalid_argument("PulseSpec: rates positive");
    if (!(beta >= 1.0)) throw std::invalid_argument("PulseSpec: beta >= 1");
  }
};

struct PulseIndexSets {
  std::vector<int> d1;  // frequency bins under the mask bound (k <= n/2)
  std::vector<int> d2;  // frequency bins forced to zero (k <= n/2)
  std::vector<int> d3;  // time indices forced to zero
};

// Errors on an incommensurate grid, naming the smallest admissible n.
PulseIndexSets build_index_sets(const PulseSpec& spec);

struct PulseReport {
  double objective = 0.0;      // ‖x‖²
  double norm_x = 0.0;
  double sum_dist_beta = 0.0;     // Σ_{k∈D1} d^β(χ⁽ᵏ⁾, disk γ)
  double sum_dist_witness = 0.0;  // Σ d^β at a feasible hard-set point
  double epsilon = 0.0;
  double beta = 0.0;
  double energy_mu = 0.0;
  double residual_nulls = 0.0;     // ‖χ(D2)‖
  double residual_zeros = 0.0;     // ‖x(D3)‖ and symmetry defect combined
  double residual_energy = 0.0;    // max(‖x‖ − μ, 0)
  bool c1_inactive = false;        // Σ d^β strictly below ε
  double preflight_residual = 0.0;
  bool feasible = true;
  int iters = 0;
  bool converged = false;
  SolverTrace trace;
};

struct PulseResult {
  Vec x;
  PulseReport report;
};

// Minimizes ‖x‖² subject to the spectral mask relaxation (budget ε on the
// summed β-distances to the γ-disk over D1), exact nulls on D2, the energy
// ball, symmetry with unit center, and the time-domain zeros.
PulseResult design_pulse(const PulseSpec& spec, const SolverConfig& config,
                         int threads = 1);

struct SpectrumRow {
  int bin = 0;
  double hz = 0.0;
  double magnitude = 0.0;
  double mask_excess = 0.0;
};

std::vector<SpectrumRow> spectrum_report(const Vec& x, const PulseSpec& spec);

}  // namespace epiprox
