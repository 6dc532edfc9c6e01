#pragma once

#include <numeric>

#include "epiprox/core.hpp"

namespace epiprox {

// Partition of a transformed vector into L blocks. `blocks[l]` holds the
// source indices gathered by block l, `weights[l]` the positive per-entry
// multipliers. In stacked (post-gather) space the blocks are contiguous in
// order, so only the sizes matter there.
struct BlockLayout {
  std::vector<std::vector<int>> blocks;
  std::vector<Vec> weights;

  int num_blocks() const { return static_cast<int>(blocks.size()); }

  int block_size(int l) const { return static_cast<int>(blocks[l].size()); }

  int total_size() const {
    int m = 0;
    for (const auto& b : blocks) m += static_cast<int>(b.size());
    return m;
  }

  // Offset of each block in the stacked vector, plus the total as sentinel.
  std::vector<int> offsets() const {
    std::vector<int> off(blocks.size() + 1, 0);
    for (std::size_t l = 0; l < blocks.size(); ++l)
      off[l + 1] = off[l] + static_cast<int>(blocks[l].size());
    return off;
  }

  void validate(int in_dim) const {
    if (blocks.empty()) throw std::invalid_argument("BlockLayout: no blocks");
    if (weights.size() != blocks.size())
      throw std::invalid_argument("BlockLayout: weights/blocks mismatch");
    for (std::size_t l = 0; l < blocks.size(); ++l) {
      if (blocks[l].empty())
        throw std::invalid_argument("BlockLayout: empty block");
      if (weights[l].size() != blocks[l].size())
        throw std::invalid_argument("BlockLayout: weight size mismatch");
      for (int idx : blocks[l])
        if (idx < 0 || idx >= in_dim)
          throw std::out_of_range("BlockLayout: index out of range");
      for (double w : weights[l])
        if (!(w > 0.0))
          throw std::invalid_argument("BlockLayout: nonpositive weight");
    }
  }

  static BlockLayout uniform(int total, int block_size) {
    if (total % block_size != 0)
      throw std::invalid_argument("BlockLayout::uniform: indivisible");
    BlockLayout lo;
    for (int off = 0; off < total; off += block_size) {
      std::vector<int> idx(block_size);
      std::iota(idx.begin(), idx.end(), off);
      lo.blocks.push_back(std::move(idx));
      lo.weights.emplace_back(block_size, 1.0);
    }
    return lo;
  }
};

}  // namespace epiprox
