#include "epiprox/linop.hpp"

#include <algorithm>
#include <complex>
#include <numbers>

namespace epiprox {

namespace {

void check_dim(const LinOp& op, const Vec& x, bool forward) {
  const int want = forward ? op.in_dim : op.out_dim;
  if (static_cast<int>(x.size()) != want)
    throw std::invalid_argument("LinOp: dimension mismatch");
}

// In-place iterative radix-2 FFT; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        auto u = a[i + j];
        auto v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<std::complex<double>> dft(std::vector<std::complex<double>> a,
                                      bool inverse) {
  if (is_pow2(static_cast<int>(a.size()))) {
    fft_pow2(a, inverse);
    return a;
  }
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(k * j) /
                         static_cast<double>(n) * (inverse ? 1 : -1);
      out[k] += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
  }
  return out;
}

}  // namespace

LinOp identity_op(int n) {
  LinOp op;
  op.in_dim = op.out_dim = n;
  op.apply = [n](const Vec& x) {
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("identity_op: dimension mismatch");
    return x;
  };
  op.adjoint = op.apply;
  op.norm_bound = 1.0;
  return op;
}

LinOp compose(const LinOp& outer, const LinOp& inner) {
  if (outer.in_dim != inner.out_dim)
    throw std::invalid_argument("compose: dimension mismatch");
  LinOp op;
  op.in_dim = inner.in_dim;
  op.out_dim = outer.out_dim;
  op.apply = [o = outer.apply, i = inner.apply](const Vec& x) {
    return o(i(x));
  };
  op.adjoint = [o = outer.adjoint, i = inner.adjoint](const Vec& y) {
    return i(o(y));
  };
  op.norm_bound = outer.norm_bound * inner.norm_bound;
  return op;
}

LinOp make_uniform_blur(int rows, int cols, int k) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("blur: bad size");
  if (k < 1 || k % 2 == 0)
    throw std::invalid_argument("blur: kernel size must be odd positive");
  if (k > std::min(rows, cols))
    throw std::invalid_argument("blur: kernel larger than image");
  const int n = rows * cols;
  const int r = k / 2;
  const double w = 1.0 / (static_cast<double>(k) * k);
  // Symmetric kernel: adjoint equals apply.
  auto conv = [rows, cols, r, w](const Vec& x) {
    Vec out(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        double s = 0.0;
        for (int di = -r; di <= r; ++di) {
          const int ii = (i + di % rows + rows) % rows;
          for (int dj = -r; dj <= r; ++dj) {
            const int jj = (j + dj % cols + cols) % cols;
            s += x[static_cast<std::size_t>(ii) * cols + jj];
          }
        }
        out[static_cast<std::size_t>(i) * cols + j] = s * w;
      }
    }
    return out;
  };
  LinOp op;
  op.in_dim = op.out_dim = n;
  op.apply = [conv, n](const Vec& x) {
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("blur: dimension mismatch");
    return conv(x);
  };
  op.adjoint = op.apply;
  op.norm_bound = 1.0;
  return op;
}

LinOp make_decimation(const std::vector<std::uint8_t>& mask) {
  std::vector<int> kept;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) kept.push_back(static_cast<int>(i));
  if (kept.empty()) throw std::invalid_argument("decimation: all-false mask");
  LinOp op;
  op.in_dim = static_cast<int>(mask.size());
  op.out_dim = static_cast<int>(kept.size());
  op.apply = [kept, in = op.in_dim](const Vec& x) {
    if (static_cast<int>(x.size()) != in)
      throw std::invalid_argument("decimation: dimension mismatch");
    Vec out(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) out[i] = x[kept[i]];
    return out;
  };
  op.adjoint = [kept, in = op.in_dim](const Vec& y) {
    if (y.size() != kept.size())
      throw std::invalid_argument("decimation: dimension mismatch");
    Vec out(in, 0.0);
    for (std::size_t i = 0; i < kept.size(); ++i) out[kept[i]] = y[i];
    return out;
  };
  op.norm_bound = 1.0;
  return op;
}

LinOp make_difference_stack(int rows, int cols,
                            const std::vector<std::pair<int, int>>& offsets) {
  if (offsets.empty())
    throw std::invalid_argument("difference_stack: empty offsets");
  for (auto [q1, q2] : offsets)
    if (q1 == 0 && q2 == 0)
      throw std::invalid_argument("difference_stack: (0,0) offset");
  const int n = rows * cols;
  // Precompute the wrapped neighbor index for each (offset, pixel).
  std::vector<std::vector<int>> nbr(offsets.size(), std::vector<int>(n));
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    const auto [q1, q2] = offsets[o];
    for (int i = 0; i < rows; ++i) {
      const int ii = ((i + q1) % rows + rows) % rows;
      for (int j = 0; j < cols; ++j) {
        const int jj = ((j + q2) % cols + cols) % cols;
        nbr[o][i * cols + j] = ii * cols + jj;
      }
    }
  }
  LinOp op;
  op.in_dim = n;
  op.out_dim = static_cast<int>(offsets.size()) * n;
  op.apply = [nbr, n](const Vec& x) {
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("difference_stack: dimension mismatch");
    Vec out(nbr.size() * static_cast<std::size_t>(n));
    std::size_t pos = 0;
    for (const auto& nb : nbr)
      for (int p = 0; p < n; ++p) out[pos++] = x[p] - x[nb[p]];
    return out;
  };
  op.adjoint = [nbr, n](const Vec& y) {
    if (y.size() != nbr.size() * static_cast<std::size_t>(n))
      throw std::invalid_argument("difference_stack: dimension mismatch");
    Vec out(n, 0.0);
    std::size_t pos = 0;
    for (const auto& nb : nbr) {
      for (int p = 0; p < n; ++p) {
        out[p] += y[pos];
        out[nb[p]] -= y[pos];
        ++pos;
      }
    }
    return out;
  };
  op.norm_bound = 2.0 * std::sqrt(static_cast<double>(offsets.size()));
  return op;
}

LinOp make_block_weighting(const BlockLayout& layout, int in_dim) {
  layout.validate(in_dim);
  // Flatten for cheap apply.
  std::vector<int> idx;
  Vec wts;
  for (std::size_t l = 0; l < layout.blocks.size(); ++l) {
    idx.insert(idx.end(), layout.blocks[l].begin(), layout.blocks[l].end());
    wts.insert(wts.end(), layout.weights[l].begin(), layout.weights[l].end());
  }
  std::vector<int> mult(in_dim, 0);
  for (int i : idx) ++mult[i];
  const int max_mult = *std::max_element(mult.begin(), mult.end());
  const double max_w = *std::max_element(wts.begin(), wts.end());
  LinOp op;
  op.in_dim = in_dim;
  op.out_dim = static_cast<int>(idx.size());
  op.apply = [idx, wts, in_dim](const Vec& x) {
    if (static_cast<int>(x.size()) != in_dim)
      throw std::invalid_argument("block_weighting: dimension mismatch");
    Vec out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = wts[i] * x[idx[i]];
    return out;
  };
  op.adjoint = [idx, wts, in_dim](const Vec& y) {
    if (y.size() != idx.size())
      throw std::invalid_argument("block_weighting: dimension mismatch");
    Vec out(in_dim, 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] += wts[i] * y[i];
    return out;
  };
  op.norm_bound = max_w * std::sqrt(static_cast<double>(max_mult));
  return op;
}

LinOp make_unitary_dft(int n) {
  if (n < 2) throw std::invalid_argument("unitary_dft: n >= 2 required");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  LinOp op;
  op.in_dim = n;
  op.out_dim = 2 * n;
  op.apply = [n, scale](const Vec& x) {
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("unitary_dft: dimension mismatch");
    std::vector<std::complex<double>> a(x.begin(), x.end());
    a = dft(std::move(a), false);
    Vec out(2 * static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      out[2 * k] = a[k].real() * scale;
      out[2 * k + 1] = a[k].imag() * scale;
    }
    return out;
  };
  op.adjoint = [n, scale](const Vec& y) {
    if (static_cast<int>(y.size()) != 2 * n)
      throw std::invalid_argument("unitary_dft: dimension mismatch");
    std::vector<std::complex<double>> a(n);
    for (int k = 0; k < n; ++k) a[k] = {y[2 * k], y[2 * k + 1]};
    a = dft(std::move(a), true);
    Vec out(n);
    // dft(·, true) is the unnormalized inverse transform.
    for (int k = 0; k < n; ++k) out[k] = a[k].real() * scale;
    return out;
  };
  op.norm_bound = 1.0;
  return op;
}

double estimate_norm(const LinOp& op, int iters, double tol,
                     std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("estimate_norm: iters >= 1");
  Rng rng(seed);
  Vec v = random_uniform(rng, op.in_dim);
  double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  for (double& x : v) x /= nv;
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = op.adjoint(op.apply(v));
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    const double prev = lambda;
    lambda = nw;  // Rayleigh quotient for unit v since w = (AᵀA)v.
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
    if (it > 0 && std::abs(lambda - prev) <= tol * std::max(1.0, lambda))
      break;
  }
  return std::sqrt(lambda) * 1.01;
}

}  // namespace epiprox
