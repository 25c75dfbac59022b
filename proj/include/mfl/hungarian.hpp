#pragma once

#include <cstddef>
#include <vector>

#include "mfl/dense.hpp"

namespace mfl {

/// Minimum-cost perfect matching on a square cost matrix (Kuhn–Munkres with
/// potentials, O(n^3)). Returns col[i], the column assigned to row i.
std::vector<std::size_t> solve_assignment(const DenseMatrix& cost);

}  // namespace mfl
