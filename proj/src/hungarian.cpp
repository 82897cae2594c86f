#include "vecsim/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vecsim/errors.hpp"

namespace vecsim {

WeightMatrix::WeightMatrix(std::initializer_list<std::initializer_list<double>> init) {
  rows = static_cast<int>(init.size());
  cols = rows ? static_cast<int>(init.begin()->size()) : 0;
  for (const auto& row : init) {
    if (static_cast<int>(row.size()) != cols) throw DomainError("ragged weight matrix");
    data.insert(data.end(), row.begin(), row.end());
  }
}

std::vector<std::pair<int, int>> Matching::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < static_cast<int>(col_of_row.size()); ++r) {
    if (col_of_row[r] >= 0) out.emplace_back(r, col_of_row[r]);
  }
  return out;
}

double matching_weight(const WeightMatrix& w, const std::vector<int>& col_of_row) {
  double total = 0.0;
  for (int r = 0; r < w.rows; ++r) {
    if (col_of_row[r] >= 0) total += w(r, col_of_row[r]);
  }
  return total;
}

double HungarianSolver::solve(const WeightMatrix& w, std::vector<int>& col_of_row) {
  col_of_row.assign(w.rows, -1);
  if (w.rows == 0 || w.cols == 0) return 0.0;

  // Minimum-cost form on costs -w; rows are the smaller side.
  const bool transposed = w.rows > w.cols;
  const int n = transposed ? w.cols : w.rows;
  const int m = transposed ? w.rows : w.cols;
  cost_.resize(static_cast<std::size_t>(n + 1) * (m + 1));
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      cost_[static_cast<std::size_t>(i) * (m + 1) + j] =
          transposed ? -w(j - 1, i - 1) : -w(i - 1, j - 1);
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  u_.assign(n + 1, 0.0);
  v_.assign(m + 1, 0.0);
  p_.assign(m + 1, 0);
  way_.assign(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p_[0] = i;
    int j0 = 0;
    minv_.assign(m + 1, inf);
    used_.assign(m + 1, 0);
    do {
      used_[j0] = 1;
      const int i0 = p_[j0];
      double delta = inf;
      int j1 = 0;
      const double* row = &cost_[static_cast<std::size_t>(i0) * (m + 1)];
      for (int j = 1; j <= m; ++j) {
        if (used_[j]) continue;
        double cur = row[j] - u_[i0] - v_[j];
        if (cur < minv_[j]) {
          minv_[j] = cur;
          way_[j] = j0;
        }
        if (minv_[j] < delta) {
          delta = minv_[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used_[j]) {
          u_[p_[j]] += delta;
          v_[j] -= delta;
        } else {
          minv_[j] -= delta;
        }
      }
      j0 = j1;
    } while (p_[j0] != 0);
    do {
      int j1 = way_[j0];
      p_[j0] = p_[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= m; ++j) {
    if (p_[j] == 0) continue;
    if (transposed) {
      col_of_row[j - 1] = p_[j] - 1;
    } else {
      col_of_row[p_[j] - 1] = j - 1;
    }
  }
  return matching_weight(w, col_of_row);
}

Matching hungarian(const WeightMatrix& w) {
  Matching result;
  if (w.rows == 0 || w.cols == 0) {
    result.col_of_row.assign(w.rows, -1);
    return result;
  }
  HungarianSolver solver;
  std::vector<int> scratch;
  const double optimum = solver.solve(w, scratch);
  const double tol = 1e-9 * std::max(1.0, std::abs(optimum));

  // Fix rows one at a time to the smallest column that still admits an
  // optimal completion.
  std::vector<int> chosen(w.rows, -1);
  std::vector<char> col_used(w.cols, 0);
  int cols_left = w.cols;
  double fixed = 0.0;
  for (int r = 0; r < w.rows; ++r) {
    const int rows_after = w.rows - r - 1;
    std::vector<int> candidates;
    for (int c = 0; c < w.cols; ++c) {
      if (!col_used[c]) candidates.push_back(c);
    }
    // Leaving this row unmatched is only allowed when the columns can still
    // be saturated by later rows.
    if (rows_after >= cols_left) candidates.push_back(-1);
    bool placed = false;
    for (int c : candidates) {
      std::vector<int> rest_cols;
      for (int k = 0; k < w.cols; ++k) {
        if (!col_used[k] && k != c) rest_cols.push_back(k);
      }
      WeightMatrix rest(rows_after, static_cast<int>(rest_cols.size()));
      for (int i = 0; i < rows_after; ++i) {
        for (int k = 0; k < rest.cols; ++k) rest(i, k) = w(r + 1 + i, rest_cols[k]);
      }
      double head = fixed + (c >= 0 ? w(r, c) : 0.0);
      double value = head + solver.solve(rest, scratch);
      if (value >= optimum - tol) {
        chosen[r] = c;
        fixed = head;
        if (c >= 0) {
          col_used[c] = 1;
          --cols_left;
        }
        placed = true;
        break;
      }
    }
    if (!placed) throw SimulationError("hungarian: no optimal completion found");
  }
  result.col_of_row = std::move(chosen);
  result.weight = matching_weight(w, result.col_of_row);
  return result;
}

} // namespace vecsim
