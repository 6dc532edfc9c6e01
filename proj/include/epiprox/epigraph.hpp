#pragma once

#include <variant>

#include "epiprox/blocks.hpp"
#include "epiprox/linop.hpp"
#include "epiprox/prox.hpp"

namespace epiprox {

// Convex sets with exact Euclidean projections, used as the target set of
// distance-function epigraphs.
struct PointSet {
  Vec c;
};
struct Ball2Set {
  Vec center;
  double radius = 0.0;
};
struct BoxSet {
  Vec lo, hi;
};
struct SubspaceSet {
  LinOp projector;  // idempotent and self-adjoint
};
using SimpleSet = std::variant<PointSet, Ball2Set, BoxSet, SubspaceSet>;

Vec project_simple_set(const SimpleSet& set, const Vec& y);
double dist_to_simple_set(const SimpleSet& set, const Vec& y);

// Per-block function kinds h⁽ℓ⁾ supported by the closed-form projections.
struct EuclideanNorm {
  double tau = 1.0;  // h(y) = τ‖y‖
};
struct WeightedInfNorm {
  Vec taus;  // h(y) = max_m |y_m|/τ_m
};
struct DistanceToSet {
  double tau = 1.0;
  double beta = 1.0;
  SimpleSet set;  // h(y) = τ d_C(y)^β
};
struct ScalarPower {
  double tau = 1.0;
  double beta = 1.0;  // h(y) = τ|y|^β, dim 1
};
using EpiKind =
    std::variant<EuclideanNorm, WeightedInfNorm, DistanceToSet, ScalarPower>;

int kind_dim_or_any(const EpiKind& kind);  // -1 when any dimension works
double kind_value(const EpiKind& kind, std::span<const double> y);

struct EpiPoint {
  Vec p;
  double theta = 0.0;
};

// Projection onto epi(τ‖·‖): the second-order cone scaled by τ.
EpiPoint project_epi_l2(double tau, const Vec& y, double zeta);

// Projection onto epi(max_m |·_m|/τ_m), sort-and-scan closed form.
EpiPoint project_epi_linf(const Vec& taus, const Vec& y, double zeta);

// Projection onto epi(τ d_C(·)^β) for a simple set C.
EpiPoint project_epi_dist(double tau, double beta, const SimpleSet& set,
                          const Vec& y, double zeta);

// Scalar epigraph projection via the prox of ½(max{τ|·|^β − ζ, 0})².
std::pair<double, double> project_epi_generic_scalar(
    const PowerProxParams& params, double y, double zeta);

EpiPoint project_epi(const EpiKind& kind, const Vec& y, double zeta);

// Paired transformed vector plus its epigraphical auxiliary scalars.
struct EpiState {
  Vec y;
  Vec zeta;
};

// Independent per-block projections; blocks are contiguous segments of s.y
// sized by the layout. Safe to run blocks in parallel.
EpiState project_epi_stack(const BlockLayout& layout,
                           const std::vector<EpiKind>& kinds, EpiState s,
                           int threads = 1);

}  // namespace epiprox
