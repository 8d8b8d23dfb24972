#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace osim {

// N x d draws, row-major. `clamped` flags rows where a sampler hit a finite
// right endpoint; such rows are excluded from distributional tests.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<unsigned char> clamped;
  std::uint64_t seed = 0;
  std::string tag;

  SampleMatrix() = default;
  SampleMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0), clamped(r, 0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  // Column c over unclamped rows.
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out;
    out.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!clamped[r]) out.push_back(at(r, c));
    }
    return out;
  }

  // Sub-matrix made of the listed columns (in order).
  SampleMatrix select(const std::vector<std::size_t>& columns) const {
    SampleMatrix out(rows, columns.size());
    out.clamped = clamped;
    out.seed = seed;
    out.tag = tag;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < columns.size(); ++j) out.at(r, j) = at(r, columns[j]);
    }
    return out;
  }

  std::size_t unclamped_rows() const {
    std::size_t n = 0;
    for (auto c : clamped) n += c ? 0 : 1;
    return n;
  }
};

}  // namespace osim
