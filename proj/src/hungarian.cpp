#include "orbitsiege/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

struct Solution {
  std::size_t matched = 0;
  double cost = 0.0;
  std::vector<std::ptrdiff_t> col_of;  // per original row, -1 when unmatched
};

// Square O(n^3) shortest-augmenting-path Hungarian method on a dense matrix.
std::vector<std::size_t> solve_square(const std::vector<double>& a, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

class Solver {
 public:
  explicit Solver(const CostMatrix& cost) : cost_(cost) {
    double sum = 0.0;
    for (std::size_t r = 0; r < cost.rows(); ++r)
      for (std::size_t c = 0; c < cost.cols(); ++c) {
        double x = cost(r, c);
        if (std::isnan(x)) throw std::invalid_argument("hungarian: NaN cost");
        if (std::isfinite(x)) sum += std::abs(x);
      }
    big_ = 2.0 * sum + 1.0;
  }

  // Best (max matched, min cost) completion with rows/cols in `row_free` /
  // `col_free` still open; fixed pairs are accounted by the caller.
  Solution solve(const std::vector<bool>& row_free, const std::vector<bool>& col_free) const {
    std::vector<std::size_t> rows, cols;
    for (std::size_t r = 0; r < cost_.rows(); ++r)
      if (row_free[r]) rows.push_back(r);
    for (std::size_t c = 0; c < cost_.cols(); ++c)
      if (col_free[c]) cols.push_back(c);
    Solution s;
    s.col_of.assign(cost_.rows(), -1);
    std::size_t n = std::max(rows.size(), cols.size());
    if (n == 0) return s;
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) {
        double x = cost_(rows[i], cols[j]);
        a[i * n + j] = std::isfinite(x) ? x : big_;
      }
    auto assign = solve_square(a, n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::size_t j = assign[i];
      if (j >= cols.size()) continue;
      double x = cost_(rows[i], cols[j]);
      if (!std::isfinite(x)) continue;
      s.col_of[rows[i]] = static_cast<std::ptrdiff_t>(cols[j]);
      ++s.matched;
      s.cost += x;
    }
    return s;
  }

 private:
  const CostMatrix& cost_;
  double big_ = 1.0;
};

bool same_value(std::size_t m1, double c1, std::size_t m2, double c2) {
  return m1 == m2 && std::abs(c1 - c2) <= 1e-9 * std::max(1.0, std::abs(c2));
}

Assignment solve_lexicographic(const CostMatrix& cost) {
  Solver solver(cost);
  std::vector<bool> row_free(cost.rows(), true), col_free(cost.cols(), true);
  Solution best = solver.solve(row_free, col_free);
  const std::size_t target_matched = best.matched;
  const double target_cost = best.cost;

  Assignment out;
  std::size_t fixed_matched = 0;
  double fixed_cost = 0.0;
  std::vector<std::ptrdiff_t> current = best.col_of;
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    row_free[r] = false;
    std::size_t limit = current[r] < 0 ? cost.cols() : static_cast<std::size_t>(current[r]);
    std::ptrdiff_t chosen = current[r];
    for (std::size_t c = 0; c < limit; ++c) {
      if (!col_free[c] || !std::isfinite(cost(r, c))) continue;
      col_free[c] = false;
      Solution rest = solver.solve(row_free, col_free);
      if (same_value(fixed_matched + 1 + rest.matched, fixed_cost + cost(r, c) + rest.cost, target_matched,
                     target_cost)) {
        chosen = static_cast<std::ptrdiff_t>(c);
        for (std::size_t k = r + 1; k < cost.rows(); ++k) current[k] = rest.col_of[k];
        break;
      }
      col_free[c] = true;
    }
    if (chosen >= 0) {
      auto c = static_cast<std::size_t>(chosen);
      col_free[c] = false;
      ++fixed_matched;
      fixed_cost += cost(r, c);
      out.pairs.emplace_back(r, c);
    }
  }
  for (const auto& [r, c] : out.pairs) out.total_cost += cost(r, c);
  return out;
}

}  // namespace

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> init)
    : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
  for (const auto& row : init) {
    if (row.size() != cols_) throw std::invalid_argument("CostMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Assignment hungarian(const CostMatrix& cost) {
  Assignment a = solve_lexicographic(cost);
  if (a.pairs.size() < std::min(cost.rows(), cost.cols()))
    throw Infeasible("no assignment of " + std::to_string(std::min(cost.rows(), cost.cols())) +
                     " pairs avoids the forbidden cells");
  return a;
}

Assignment hungarian_partial(const CostMatrix& cost) { return solve_lexicographic(cost); }

}  // namespace orbitsiege
