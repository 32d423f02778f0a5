#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace orbitsiege {

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

// Dense row-major cost matrix; kForbidden marks pairs that may not be used.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> init);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), ascending rows
  double total_cost = 0.0;
};

/// Minimum-cost assignment of min(rows, cols) pairs. Among optimal
/// assignments the lexicographically smallest (row, col) sequence wins.
/// Throws Infeasible when forbidden cells leave no full assignment.
Assignment hungarian(const CostMatrix& cost);

/// Same, but rows that cannot be matched are left out: maximizes the number
/// of pairs first, then minimizes cost, then applies the same tie-break.
Assignment hungarian_partial(const CostMatrix& cost);

}  // namespace orbitsiege
