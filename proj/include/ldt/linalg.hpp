#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldt/gf.hpp"

namespace ldt {

// Dense row-major matrix over GF(q). Internal workhorse for canonical
// forms, flat intersections and interpolation; sizes stay tiny.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint32_t> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

  std::uint32_t& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  std::uint32_t at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
  std::span<const std::uint32_t> row(int r) const {
    return {a.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
};

// In-place reduced row echelon form; returns the pivot columns in row order.
// Zero rows sink to the bottom.
std::vector<int> rref(const Field& f, Mat& m);

int rank(const Field& f, Mat m);

// Solves A x = b (x has A.cols entries). Free variables are set to zero.
// Returns nullopt when the system is inconsistent.
std::optional<std::vector<std::uint32_t>> solve(const Field& f, const Mat& a,
                                                std::span<const std::uint32_t> b);

// Basis of the column kernel { x : A x = 0 }.
std::vector<std::vector<std::uint32_t>> kernel(const Field& f, Mat a);

}  // namespace ldt
