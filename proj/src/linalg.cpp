#include "ldt/linalg.hpp"

#include <stdexcept>

namespace ldt {

std::vector<int> rref(const Field& f, Mat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int pr = -1;
    for (int r = row; r < m.rows; ++r) {
      if (m.at(r, col) != 0) {
        pr = r;
        break;
      }
    }
    if (pr < 0) continue;
    if (pr != row) {
      for (int c = 0; c < m.cols; ++c) std::swap(m.at(pr, c), m.at(row, c));
    }
    const std::uint32_t scale = f.inv(m.at(row, col));
    for (int c = col; c < m.cols; ++c) m.at(row, c) = f.mul(m.at(row, c), scale);
    for (int r = 0; r < m.rows; ++r) {
      if (r == row) continue;
      const std::uint32_t factor = m.at(r, col);
      if (factor == 0) continue;
      for (int c = col; c < m.cols; ++c) {
        m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(row, c)));
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int rank(const Field& f, Mat m) {
  return static_cast<int>(rref(f, m).size());
}

std::optional<std::vector<std::uint32_t>> solve(const Field& f, const Mat& a,
                                                std::span<const std::uint32_t> b) {
  if (static_cast<int>(b.size()) != a.rows) {
    throw std::invalid_argument("solve: rhs length does not match row count");
  }
  Mat aug(a.rows, a.cols + 1);
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, a.cols) = b[r];
  }
  std::vector<int> pivots = rref(f, aug);
  for (int p : pivots) {
    if (p == a.cols) return std::nullopt;  // row of the form 0 = 1
  }
  std::vector<std::uint32_t> x(a.cols, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    x[pivots[i]] = aug.at(static_cast<int>(i), a.cols);
  }
  return x;
}

std::vector<std::vector<std::uint32_t>> kernel(const Field& f, Mat a) {
  std::vector<int> pivots = rref(f, a);
  std::vector<bool> is_pivot(a.cols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<std::uint32_t>> basis;
  for (int free_col = 0; free_col < a.cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<std::uint32_t> v(a.cols, 0);
    v[free_col] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      v[pivots[i]] = f.neg(a.at(static_cast<int>(i), free_col));
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace ldt
