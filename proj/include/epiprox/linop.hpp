#pragma once

#include <functional>
#include <utility>

#include "epiprox/blocks.hpp"
#include "epiprox/core.hpp"

namespace epiprox {

// Bounded linear map with forward/adjoint applies and an upper bound on the
// spectral norm. Instances are immutable after construction; apply/adjoint
// must be reentrant.
struct LinOp {
  int in_dim = 0;
  int out_dim = 0;
  std::function<Vec(const Vec&)> apply;
  std::function<Vec(const Vec&)> adjoint;
  double norm_bound = 0.0;

  Vec operator()(const Vec& x) const { return apply(x); }
};

LinOp identity_op(int n);

// outer ∘ inner; norm bound multiplies.
LinOp compose(const LinOp& outer, const LinOp& inner);

// Periodic 2-D convolution with the k×k kernel of constant value 1/k².
LinOp make_uniform_blur(int rows, int cols, int k);

// Keeps the coordinates where mask is nonzero, in index order.
LinOp make_decimation(const std::vector<std::uint8_t>& mask);

// Stack of periodic difference filters x(n) - x(n + (q1,q2)).
LinOp make_difference_stack(int rows, int cols,
                            const std::vector<std::pair<int, int>>& offsets);

// Gathers weighted entries block-by-block: y = [Ω_1 B_1; ...; Ω_L B_L] x.
LinOp make_block_weighting(const BlockLayout& layout, int in_dim);

// Real-packed unitary DFT: length-N real input to length-2N output storing
// (Re χ(0), Im χ(0), Re χ(1), ...) with 1/√N scaling. Parseval holds.
LinOp make_unitary_dft(int n);

// Power iteration on adjoint∘apply from a fixed-seed start; returns the
// dominant singular value estimate times a 1.01 safety factor.
double estimate_norm(const LinOp& op, int iters = 200, double tol = 1e-10,
                     std::uint64_t seed = 12345);

}  // namespace epiprox
