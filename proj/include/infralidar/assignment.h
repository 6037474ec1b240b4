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

/// \file
/// \brief Rectangular linear assignment (Hungarian algorithm).

#ifndef INFRALIDAR_ASSIGNMENT_H_
#define INFRALIDAR_ASSIGNMENT_H_

#include <vector>

#include <Eigen/Core>

namespace infralidar {

/// Minimum-cost assignment of rows to columns. Every row is assigned when
/// rows <= cols, every column otherwise. Entries equal to +infinity are
/// forbidden: the solver first maximizes the number of allowed pairs, then
/// minimizes their total cost, and reports forbidden pairs as -1.
/// Returns the column for each row, or -1.
std::vector<int> SolveAssignment(const Eigen::MatrixXd& cost);

/// Sum of cost(i, row_to_col[i]) over assigned rows.
double AssignmentCost(const Eigen::MatrixXd& cost,
                      const std::vector<int>& row_to_col);

}  // namespace infralidar

#endif  // INFRALIDAR_ASSIGNMENT_H_
