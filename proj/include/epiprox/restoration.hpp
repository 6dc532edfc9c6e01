#pragma once

#include <cstdint>
#include <optional>

#include "epiprox/constraints.hpp"
#include "epiprox/image_io.hpp"
#include "epiprox/solver.hpp"

namespace epiprox {

// z = D A x̄ + b: uniform blur, random decimation, Gaussian noise.
struct DegradationSpec {
  int blur_size = 3;
  double keep_fraction = 0.4;
  double noise_sigma = 10.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (blur_size < 1 || blur_size % 2 == 0)
      throw std::invalid_argument("DegradationSpec: blur_size odd >= 1");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
      throw std::invalid_argument("DegradationSpec: keep_fraction in (0,1]");
    if (!(noise_sigma >= 0.0))
      throw std::invalid_argument("DegradationSpec: noise_sigma >= 0");
  }
};

struct Degraded {
  Vec z;
  std::vector<std::uint8_t> mask;
  LinOp blur;        // A
  LinOp decimation;  // D
};

Degraded degrade(const ImageGrid& truth, const DegradationSpec& spec);

// A level-set constraint on a lifted transform of the image: value is
// Σℓ h⁽ℓ⁾((ΛF x)⁽ℓ⁾) ≤ eta, with contiguous blocks in the lifted space.
struct TransformedConstraint {
  LinOp lifted;  // ΛF
  DecomposableConstraint constraint;
};

enum class BlockNorm { L2, Linf };

// Isotropic/sup-norm TV: per-pixel blocks of the horizontal and vertical
// periodic forward differences, unit weights.
TransformedConstraint build_tv_constraint(int rows, int cols, BlockNorm p,
                                          double eta);

struct NltvSpec {
  int window = 11;       // Q
  int patch = 5;         // Q̃
  double delta = 35.0;   // δ
  int max_neighbors = 14;  // M̄
  BlockNorm p = BlockNorm::L2;
  double eta = 0.0;

  void validate() const {
    if (window < 3 || window % 2 == 0 || patch < 1 || patch % 2 == 0)
      throw std::invalid_argument("NltvSpec: window/patch odd");
    if (!(delta > 0.0)) throw std::invalid_argument("NltvSpec: delta > 0");
    if (max_neighbors < 1 || max_neighbors > window * window - 1)
      throw std::invalid_argument("NltvSpec: max_neighbors in [1, Q^2-1]");
  }
};

// Per-pixel neighbor offsets (row, col) and weights, Σ weights = 1.
struct NltvWeights {
  std::vector<std::vector<std::pair<std::pair<int, int>, double>>> neighbors;
};

struct RestoreOptions;

// Two-step estimation: an ℓ₂-TV solve with bound tv_eta gives the pilot
// image, then Gaussian-windowed patch distances give the weights.
NltvWeights estimate_weights(const Degraded& d, int rows, int cols,
                             const NltvSpec& spec, double tv_eta,
                             const SolverConfig& pilot_config);

// Same, from an already available pilot image.
NltvWeights weights_from_pilot(const ImageGrid& pilot, const NltvSpec& spec);

TransformedConstraint build_nltv_constraint(int rows, int cols,
                                            const NltvWeights& w, BlockNorm p,
                                            double eta);

struct RestoredResult {
  ImageGrid image;
  double snr_db = 0.0;
  double ssim = 0.0;
  SolverTrace trace;
  double objective = 0.0;
  double constraint_violation = 0.0;
};

enum class Method { Epigraphical, Direct };

struct RestoreOptions {
  Method method = Method::Epigraphical;
  Box box{0.0, 255.0};
  SolverConfig solver;
  int threads = 1;
  double direct_tol = 1e-10;  // inner tolerance of the ℓ₁,∞ baseline
  const ImageGrid* ground_truth = nullptr;
};

RestoredResult restore(const Degraded& d, int rows, int cols,
                       const TransformedConstraint& tc,
                       const RestoreOptions& opts);

// Zero-filled observation DᵀZ as an image (the naive baseline).
ImageGrid zero_fill(const Degraded& d, int rows, int cols);

double snr_db(const ImageGrid& reference, const ImageGrid& estimate);
double ssim(const ImageGrid& a, const ImageGrid& b);

// Deterministic textured test image: piecewise-constant shapes over smooth
// ramps with sinusoidal texture, values in [0, 255].
ImageGrid make_test_image(int rows, int cols);

}  // namespace epiprox
