#pragma once

#include <vector>

#include <Eigen/Core>

namespace liemix {

struct Assignment {
    /// row_to_col[i] is the column assigned to row i.
    std::vector<int> row_to_col;
    double cost = 0.0;
};

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// Hungarian method with potentials, O(rows^2 cols).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace liemix
