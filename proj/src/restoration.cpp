#include "epiprox/restoration.hpp"

#include <algorithm>

#include "epiprox/ballproj.hpp"
#include <map>
#include <numeric>

namespace epiprox {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec clip_to_box(Vec x, const Box& box) {
  for (double& v : x) v = std::clamp(v, box.lo, box.hi);
  return x;
}

// Block-diagonal stack of an operator on x with the identity on ζ.
LinOp augment_with_identity(const LinOp& op, int extra) {
  LinOp out;
  out.in_dim = op.in_dim + extra;
  out.out_dim = op.out_dim + extra;
  const int n = op.in_dim, m = op.out_dim;
  out.apply = [op, n, m, extra](const Vec& v) {
    Vec x(v.begin(), v.begin() + n);
    Vec y = op.apply(x);
    y.resize(m + extra);
    std::copy(v.begin() + n, v.end(), y.begin() + m);
    return y;
  };
  out.adjoint = [op, n, m, extra](const Vec& v) {
    Vec y(v.begin(), v.begin() + m);
    Vec x = op.adjoint(y);
    x.resize(n + extra);
    std::copy(v.begin() + m, v.end(), x.begin() + n);
    return x;
  };
  out.norm_bound = std::max(op.norm_bound, 1.0);
  return out;
}

// Entrywise output scaling S∘op with its own tight norm estimate.
LinOp scale_outputs(const LinOp& op, Vec scales) {
  LinOp out;
  out.in_dim = op.in_dim;
  out.out_dim = op.out_dim;
  out.apply = [op, scales](const Vec& x) {
    Vec y = op.apply(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= scales[i];
    return y;
  };
  out.adjoint = [op, scales](const Vec& y) {
    Vec s = y;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= scales[i];
    return op.adjoint(s);
  };
  out.norm_bound = op.norm_bound * norm_inf(scales);
  out.norm_bound = std::min(out.norm_bound, estimate_norm(out));
  return out;
}

double gaussian_window_distance(const ImageGrid& img, int i, int j, int q1,
                                int q2, const std::vector<double>& win,
                                int half) {
  const int rows = img.rows, cols = img.cols;
  double d2 = 0.0;
  int w = 0;
  for (int a = -half; a <= half; ++a) {
    const int ra = ((i + a) % rows + rows) % rows;
    const int rb = ((i + q1 + a) % rows + rows) % rows;
    for (int b = -half; b <= half; ++b, ++w) {
      const int ca = ((j + b) % cols + cols) % cols;
      const int cb = ((j + q2 + b) % cols + cols) % cols;
      const double diff = img.at(ra, ca) - img.at(rb, cb);
      d2 += win[w] * diff * diff;
    }
  }
  return d2;
}

}  // namespace

Degraded degrade(const ImageGrid& truth, const DegradationSpec& spec) {
  spec.validate();
  const int n = truth.size();
  Rng rng(spec.seed);
  // Mask drawn uniformly without replacement.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int keep = static_cast<int>(
      std::ceil(spec.keep_fraction * static_cast<double>(n)));
  std::vector<std::uint8_t> mask(n, 0);
  for (int i = 0; i < keep; ++i) mask[order[i]] = 1;

  Degraded d;
  d.blur = (spec.blur_size == 1)
               ? identity_op(n)
               : make_uniform_blur(truth.rows, truth.cols, spec.blur_size);
  d.decimation = make_decimation(mask);
  d.mask = std::move(mask);
  d.z = d.decimation.apply(d.blur.apply(truth.pixels));
  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (double& v : d.z) v += noise(rng);
  }
  return d;
}

TransformedConstraint build_tv_constraint(int rows, int cols, BlockNorm p,
                                          double eta) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("tv_constraint: rows, cols >= 2");
  const int n = rows * cols;
  LinOp f = make_difference_stack(rows, cols, {{0, 1}, {1, 0}});
  // Gather (horizontal, vertical) difference pairs per pixel.
  BlockLayout gather;
  gather.blocks.resize(n);
  gather.weights.resize(n);
  for (int l = 0; l < n; ++l) {
    gather.blocks[l] = {l, n + l};
    gather.weights[l] = {1.0, 1.0};
  }
  TransformedConstraint tc;
  tc.lifted = compose(make_block_weighting(gather, f.out_dim), f);
  tc.lifted.norm_bound = std::min(tc.lifted.norm_bound,
                                  estimate_norm(tc.lifted));
  tc.constraint.layout = BlockLayout::uniform(2 * n, 2);
  tc.constraint.kinds.assign(
      n, p == BlockNorm::L2 ? EpiKind{EuclideanNorm{1.0}}
                            : EpiKind{WeightedInfNorm{{1.0, 1.0}}});
  tc.constraint.eta = eta;
  tc.constraint.validate();
  return tc;
}

NltvWeights weights_from_pilot(const ImageGrid& pilot, const NltvSpec& spec) {
  spec.validate();
  const int rows = pilot.rows, cols = pilot.cols, n = rows * cols;
  const int wh = spec.window / 2, ph = spec.patch / 2;
  // Gaussian patch window, std Q̃/4, normalized to sum 1.
  const double sigma = spec.patch / 4.0;
  std::vector<double> win;
  double wsum = 0.0;
  for (int a = -ph; a <= ph; ++a)
    for (int b = -ph; b <= ph; ++b) {
      const double g = std::exp(-(a * a + b * b) / (2.0 * sigma * sigma));
      win.push_back(g);
      wsum += g;
    }
  for (double& g : win) g /= wsum;

  NltvWeights out;
  out.neighbors.resize(n);
  const double inv_d2 = 1.0 / (spec.delta * spec.delta);
  std::vector<std::pair<double, std::pair<int, int>>> cand;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      cand.clear();
      for (int q1 = -wh; q1 <= wh; ++q1)
        for (int q2 = -wh; q2 <= wh; ++q2) {
          if (q1 == 0 && q2 == 0) continue;  // center excluded
          const double d2 =
              gaussian_window_distance(pilot, i, j, q1, q2, win, ph);
          cand.emplace_back(std::exp(-d2 * inv_d2), std::make_pair(q1, q2));
        }
      std::stable_sort(cand.begin(), cand.end(),
                       [](const auto& a, const auto& b) {
                         return a.first > b.first;
                       });
      cand.resize(spec.max_neighbors);
      double s = 0.0;
      for (const auto& [w, q] : cand) s += w;
      auto& nb = out.neighbors[static_cast<std::size_t>(i) * cols + j];
      nb.reserve(cand.size());
      for (const auto& [w, q] : cand) nb.emplace_back(q, w / s);
    }
  return out;
}

TransformedConstraint build_nltv_constraint(int rows, int cols,
                                            const NltvWeights& w, BlockNorm p,
                                            double eta) {
  const int n = rows * cols;
  if (static_cast<int>(w.neighbors.size()) != n)
    throw std::invalid_argument("nltv_constraint: weights size mismatch");
  // Union of used offsets, each mapped to one difference-stack slice.
  std::map<std::pair<int, int>, int> slice;
  for (const auto& nb : w.neighbors) {
    if (nb.empty())
      throw std::invalid_argument("nltv_constraint: empty neighborhood");
    for (const auto& [q, wt] : nb)
      slice.emplace(q, static_cast<int>(slice.size()));
  }
  std::vector<std::pair<int, int>> offsets(slice.size());
  for (const auto& [q, o] : slice) offsets[o] = q;
  LinOp f = make_difference_stack(rows, cols, offsets);

  TransformedConstraint tc;
  BlockLayout gather;
  gather.blocks.resize(n);
  gather.weights.resize(n);
  tc.constraint.layout.blocks.resize(n);
  tc.constraint.layout.weights.resize(n);
  tc.constraint.kinds.reserve(n);
  int pos = 0;
  for (int l = 0; l < n; ++l) {
    const auto& nb = w.neighbors[l];
    Vec taus;
    for (const auto& [q, wt] : nb) {
      gather.blocks[l].push_back(slice.at(q) * n + l);
      // p=2 folds √ω into the lifting; p=∞ keeps the lifting unweighted and
      // puts the reciprocal weight into the sup-norm scales.
      gather.weights[l].push_back(p == BlockNorm::L2 ? std::sqrt(wt) : 1.0);
      if (p == BlockNorm::Linf) taus.push_back(1.0 / wt);
    }
    const int m = static_cast<int>(nb.size());
    auto& blk = tc.constraint.layout.blocks[l];
    blk.resize(m);
    std::iota(blk.begin(), blk.end(), pos);
    tc.constraint.layout.weights[l].assign(m, 1.0);
    pos += m;
    tc.constraint.kinds.push_back(p == BlockNorm::L2
                                      ? EpiKind{EuclideanNorm{1.0}}
                                      : EpiKind{WeightedInfNorm{std::move(taus)}});
  }
  tc.lifted = compose(make_block_weighting(gather, f.out_dim), f);
  tc.lifted.norm_bound = std::min(tc.lifted.norm_bound,
                                  estimate_norm(tc.lifted));
  tc.constraint.eta = eta;
  tc.constraint.validate();
  return tc;
}

ImageGrid zero_fill(const Degraded& d, int rows, int cols) {
  return {rows, cols, d.decimation.adjoint(d.z)};
}

RestoredResult restore(const Degraded& d, int rows, int cols,
                       const TransformedConstraint& tc,
                       const RestoreOptions& opts) {
  const int n = rows * cols;
  LinOp da = compose(d.decimation, d.blur);
  const double da_norm = std::min(da.norm_bound, estimate_norm(da));
  const Vec& z = d.z;

  Vec x0 = clip_to_box(d.blur.adjoint(d.decimation.adjoint(z)), opts.box);

  const int L = tc.constraint.layout.num_blocks();
  SolverProblem prob;
  RestoredResult res;

  auto smooth_on_x = [&](int dim) {
    SmoothTerm s;
    s.value = [da, z, dim](const Vec& v) {
      Vec x(v.begin(), v.begin() + da.in_dim);
      Vec r = da.apply(x) - z;
      const double nr = norm2(r);
      return nr * nr;
    };
    s.gradient = [da, z, dim](const Vec& v) {
      Vec x(v.begin(), v.begin() + da.in_dim);
      Vec g = da.adjoint(da.apply(x) - z);
      Vec out(dim, 0.0);
      for (int i = 0; i < da.in_dim; ++i) out[i] = 2.0 * g[i];
      return out;
    };
    s.lipschitz = 2.0 * da_norm * da_norm;
    return s;
  };

  Vec x0aug;
  if (opts.method == Method::Epigraphical) {
    auto sc = split(tc.constraint, BudgetForm::Inequality, opts.threads);
    prob.dim = n + L;
    prob.smooth = smooth_on_x(n + L);
    const Box box = opts.box;
    const HalfSpace hs = sc.halfspace;
    prob.primal_project = [box, hs, n, L](Vec v) {
      for (int i = 0; i < n; ++i) v[i] = std::clamp(v[i], box.lo, box.hi);
      Vec zeta(v.begin() + n, v.end());
      zeta = project_halfspace(hs, std::move(zeta));
      std::copy(zeta.begin(), zeta.end(), v.begin() + n);
      return v;
    };
    LinOp h = augment_with_identity(tc.lifted, L);
    const int m = tc.lifted.out_dim;
    auto epi = sc.epi_projector;
    prob.dual_terms.push_back(
        {std::move(h), [epi, m](const Vec& v) {
           EpiState s{Vec(v.begin(), v.begin() + m), Vec(v.begin() + m, v.end())};
           s = epi(std::move(s));
           Vec out = std::move(s.y);
           out.insert(out.end(), s.zeta.begin(), s.zeta.end());
           return out;
         }});
    Vec zeta0 = init_zeta(tc.constraint, tc.lifted.apply(x0));
    x0aug = x0;
    x0aug.insert(x0aug.end(), zeta0.begin(), zeta0.end());
  } else {
    prob.dim = n;
    prob.smooth = smooth_on_x(n);
    const Box box = opts.box;
    prob.primal_project = [box](Vec v) { return clip_to_box(std::move(v), box); };
    const BlockLayout layout = tc.constraint.layout;
    const double eta = tc.constraint.eta;
    const bool is_l2 =
        std::holds_alternative<EuclideanNorm>(tc.constraint.kinds[0]);
    if (is_l2) {
      prob.dual_terms.push_back({tc.lifted, [layout, eta](const Vec& v) {
                                   return project_l12_ball(layout, eta, v);
                                 }});
    } else {
      // Fold the sup-norm scales into the operator so the unit-weight ball
      // projection applies to the same constraint.
      Vec scales(tc.lifted.out_dim, 1.0);
      const auto off = layout.offsets();
      for (int l = 0; l < L; ++l) {
        const auto& taus = std::get<WeightedInfNorm>(tc.constraint.kinds[l]).taus;
        for (std::size_t i = 0; i < taus.size(); ++i)
          scales[off[l] + static_cast<int>(i)] = 1.0 / taus[i];
      }
      LinOp scaled = scale_outputs(tc.lifted, std::move(scales));
      const double tol = opts.direct_tol;
      prob.dual_terms.push_back({std::move(scaled),
                                 [layout, eta, tol](const Vec& v) {
                                   return project_l1inf_ball(layout, eta, v, tol);
                                 }});
    }
    x0aug = x0;
  }

  SolveResult sr = solve(prob, std::move(x0aug), opts.solver);
  res.trace = std::move(sr.trace);
  res.image.rows = rows;
  res.image.cols = cols;
  res.image.pixels.assign(sr.x.begin(), sr.x.begin() + n);
  Vec rdiff = da.apply(res.image.pixels) - z;
  res.objective = norm2(rdiff) * norm2(rdiff);
  res.constraint_violation =
      std::max(0.0, constraint_value(tc.constraint,
                                     tc.lifted.apply(res.image.pixels)) -
                        tc.constraint.eta);
  if (opts.ground_truth) {
    res.snr_db = snr_db(*opts.ground_truth, res.image);
    res.ssim = ssim(*opts.ground_truth, res.image);
  }
  return res;
}

NltvWeights estimate_weights(const Degraded& d, int rows, int cols,
                             const NltvSpec& spec, double tv_eta,
                             const SolverConfig& pilot_config) {
  TransformedConstraint tv = build_tv_constraint(rows, cols, BlockNorm::L2,
                                                 tv_eta);
  RestoreOptions opts;
  opts.solver = pilot_config;
  RestoredResult pilot = restore(d, rows, cols, tv, opts);
  return weights_from_pilot(pilot.image, spec);
}

double snr_db(const ImageGrid& reference, const ImageGrid& estimate) {
  if (reference.rows != estimate.rows || reference.cols != estimate.cols)
    throw std::invalid_argument("snr_db: dimension mismatch");
  const double nref = norm2(reference.pixels);
  const double nerr = norm2(reference.pixels - estimate.pixels);
  if (nerr == 0.0) return 300.0;
  return std::min(300.0, 20.0 * std::log10(nref / nerr));
}

double ssim(const ImageGrid& a, const ImageGrid& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("ssim: dimension mismatch");
  const int rows = a.rows, cols = a.cols;
  const int half = 5;  // 11×11 window
  const double sigma = 1.5;
  std::vector<double> win;
  double wsum = 0.0;
  for (int u = -half; u <= half; ++u)
    for (int v = -half; v <= half; ++v) {
      const double g = std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
      win.push_back(g);
      wsum += g;
    }
  for (double& g : win) g /= wsum;
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  double acc = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      int w = 0;
      for (int u = -half; u <= half; ++u) {
        const int r = ((i + u) % rows + rows) % rows;
        for (int v = -half; v <= half; ++v, ++w) {
          const int c = ((j + v) % cols + cols) % cols;
          const double pa = a.at(r, c), pb = b.at(r, c);
          ma += win[w] * pa;
          mb += win[w] * pb;
          saa += win[w] * pa * pa;
          sbb += win[w] * pb * pb;
          sab += win[w] * pa * pb;
        }
      }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cab = sab - ma * mb;
      acc += ((2.0 * ma * mb + c1) * (2.0 * cab + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  return acc / (static_cast<double>(rows) * cols);
}

ImageGrid make_test_image(int rows, int cols) {
  ImageGrid img{rows, cols, Vec(static_cast<std::size_t>(rows) * cols)};
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double v = 70.0 + 0.5 * (i + j) * 255.0 / (rows + cols);  // ramp
      if (i >= rows / 8 && i < rows / 2 && j >= cols / 8 && j < cols / 2)
        v = 200.0;  // bright block
      const double di = i - 0.72 * rows, dj = j - 0.70 * cols;
      if (di * di + dj * dj < (0.18 * rows) * (0.18 * cols)) v = 60.0;  // disk
      if (i >= rows / 2)  // textured lower half
        v += 30.0 * std::sin(2.0 * kPi * j / 8.0) * std::sin(2.0 * kPi * i / 16.0);
      img.at(i, j) = std::clamp(v, 0.0, 255.0);
    }
  return img;
}

}  // namespace epiprox
