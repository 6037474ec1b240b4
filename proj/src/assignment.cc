// Copyright 2026 The Infralidar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "infralidar/assignment.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace infralidar {
namespace {

// Shortest augmenting path with potentials; requires n <= m. Returns the
// column for each row. a is 1-indexed internally.
std::vector<int> Hungarian(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> SolveAssignment(const Eigen::MatrixXd& cost) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);

  // Forbidden entries become a penalty larger than any allowed total.
  double span = 0.0;
  bool any_forbidden = false;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double c = cost(i, j);
      if (std::isnan(c) || c == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("assignment cost must be finite or +inf");
      }
      if (std::isinf(c)) {
        any_forbidden = true;
      } else {
        span = std::max(span, std::abs(c));
      }
    }
  }
  Eigen::MatrixXd work = cost;
  if (any_forbidden) {
    const double big =
        (2.0 * span + 1.0) * static_cast<double>(std::min(rows, cols) + 1);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (std::isinf(work(i, j))) work(i, j) = big;
      }
    }
  }

  std::vector<int> row_to_col(rows, -1);
  if (rows <= cols) {
    row_to_col = Hungarian(work);
  } else {
    const std::vector<int> col_to_row = Hungarian(work.transpose());
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = static_cast<int>(j);
    }
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (row_to_col[i] >= 0 && std::isinf(cost(i, row_to_col[i]))) {
      row_to_col[i] = -1;
    }
  }
  return row_to_col;
}

double AssignmentCost(const Eigen::MatrixXd& cost,
                      const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) {
      total += cost(static_cast<Eigen::Index>(i), row_to_col[i]);
    }
  }
  return total;
}

}  // namespace infralidar
