#pragma once

#include <utility>
#include <vector>

namespace vecsim {

// Dense row-major matrix of non-negative edge weights.
struct WeightMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  WeightMatrix() = default;
  WeightMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
  WeightMatrix(std::initializer_list<std::initializer_list<double>> init);

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

struct Matching {
  // col_of_row[r] is the matched column or -1.
  std::vector<int> col_of_row;
  double weight = 0.0;

  std::vector<std::pair<int, int>> pairs() const;
};

// Reusable scratch space for the shortest-augmenting-path Hungarian method.
// Not thread-safe; give each thread its own instance.
class HungarianSolver {
public:
  // Maximum-weight matching saturating min(rows, cols). Writes the assignment
  // into `col_of_row` (size rows) and returns its weight summed in row order.
  double solve(const WeightMatrix& w, std::vector<int>& col_of_row);

private:
  std::vector<double> u_, v_, minv_, cost_;
  std::vector<int> p_, way_;
  std::vector<char> used_;
};

// Maximum-weight matching; among optimal matchings returns the
// lexicographically smallest column vector (unmatched rows rank last).
// An empty matrix gives an empty matching of weight 0.
Matching hungarian(const WeightMatrix& w);

// Weight of a full assignment summed in row order.
double matching_weight(const WeightMatrix& w, const std::vector<int>& col_of_row);

} // namespace vecsim
