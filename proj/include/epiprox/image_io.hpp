#pragma once

#include <string>

#include "epiprox/core.hpp"

namespace epiprox {

// Row-major grayscale image with values in [0, 255].
struct ImageGrid {
  int rows = 0;
  int cols = 0;
  Vec pixels;

  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * cols + c];
  }
  int size() const { return rows * cols; }
};

// 8-bit binary PGM (P5). Values are clamped and rounded on write.
ImageGrid read_pgm(const std::string& path);
void write_pgm(const ImageGrid& img, const std::string& path);

// Plain CSV matrix of doubles, one row per line.
ImageGrid read_csv_matrix(const std::string& path);
void write_csv_matrix(const ImageGrid& img, const std::string& path);

}  // namespace epiprox
