#include "epiprox/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epiprox {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == EOF) throw std::runtime_error("pgm: truncated header");
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int v = 0;
  if (!(in >> v)) throw std::runtime_error("pgm: bad header integer");
  return v;
}

}  // namespace

ImageGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") throw std::runtime_error("pgm: not a P5 file: " + path);
  const int cols = next_header_int(in);
  const int rows = next_header_int(in);
  const int maxval = next_header_int(in);
  if (cols <= 0 || rows <= 0 || maxval != 255)
    throw std::runtime_error("pgm: unsupported header in " + path);
  in.get();  // the single whitespace byte before the raster
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(raw.data()), raw.size());
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("pgm: truncated raster in " + path);
  ImageGrid img{rows, cols, Vec(raw.size())};
  for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  return img;
}

void write_pgm(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P5\n" << img.cols << ' ' << img.rows << "\n255\n";
  std::vector<unsigned char> raw(img.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::round(img.pixels[i]);
    raw[i] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
}

ImageGrid read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ImageGrid img;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int count = 0;
    while (std::getline(ss, cell, ',')) {
      img.pixels.push_back(std::stod(cell));
      ++count;
    }
    if (img.cols == 0)
      img.cols = count;
    else if (count != img.cols)
      throw std::runtime_error("csv: ragged rows in " + path);
    ++img.rows;
  }
  if (img.rows == 0) throw std::runtime_error("csv: empty matrix in " + path);
  return img;
}

void write_csv_matrix(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[64];
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", img.at(r, c));
      out << buf << (c + 1 == img.cols ? '\n' : ',');
    }
  }
}

}  // namespace epiprox
