#pragma once

#include <vector>

#include <Eigen/Core>

namespace kinevent {

/// Maximum-total-weight one-to-one assignment (Kuhn-Munkres with potentials, O(n^3)).
/// Returns, for every row, the assigned column or -1. Rectangular input is allowed;
/// every row or every column ends up assigned, possibly to zero-weight entries.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

}  // namespace kinevent
