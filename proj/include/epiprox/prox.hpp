#pragma once

#include "epiprox/core.hpp"

namespace epiprox {

// Parameters of φ(y) = τ|y|^β and the epigraph height ζ.
struct PowerProxParams {
  double tau = 1.0;
  double beta = 1.0;
  double zeta = 0.0;

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("PowerProxParams: tau > 0");
    if (!(beta >= 1.0))
      throw std::invalid_argument("PowerProxParams: beta >= 1");
  }
};

// prox of u ↦ ½(max{τ|u|^β − ζ, 0})². Odd and nondecreasing in y; the
// returned value satisfies βτ²χ^{2β−1} − βτζχ^{β−1} + χ = |y| to within
// 1e−12·(1+|y|) on the active branch.
double prox_power_max_sq(const PowerProxParams& params, double y);

struct Box {
  double lo = 0.0;
  double hi = 0.0;

  void validate() const {
    if (!(lo <= hi)) throw std::invalid_argument("Box: lo <= hi");
  }
};

Vec project_box(const Box& box, Vec x);

// {ζ ∈ ℝ^dim : 1ᵀζ ≤ eta}.
struct HalfSpace {
  int dim = 0;
  double eta = 0.0;
};

Vec project_halfspace(const HalfSpace& hs, Vec z);

// Same data, onto the hyperplane 1ᵀζ = eta.
Vec project_hyperplane(const HalfSpace& hs, Vec z);

Vec project_l2_ball(double radius, Vec x);

// Sort-based Euclidean projection onto {u : Σ|uᵢ| ≤ radius}.
Vec project_l1_ball(double radius, const Vec& x);

}  // namespace epiprox
