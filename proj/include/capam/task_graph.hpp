#pragma once

#include <vector>

#include "capam/instance.hpp"
#include "capam/tensor.hpp"

namespace capam {

// Complete undirected task graph: normalized node features, similarity
// adjacency, Laplacian and precomputed Laplacian powers. Immutable after
// construction; task-status changes enter the policy via masking only.
struct TaskGraph {
  int n = 0;
  Tensor features;               // N x 3 (or N x 4 with the workload switch)
  Tensor adjacency;              // N x N, alpha_ij in (0,1], zero diagonal
  Tensor degree;                 // N x N diagonal
  Tensor laplacian;              // degree - adjacency
  std::vector<Tensor> l_powers;  // [I, L, L^2, ..., L^K]

  static TaskGraph build(const ProblemInstance& inst, int filter_degree,
                         bool include_workload = false);
};

// Row i = [x/grid, y/grid, d/d_max] (+ w/w_max with the workload switch).
// Throws if a task sits outside the grid or exceeds d_max.
Tensor normalize_features(const std::vector<TaskNode>& tasks, double grid,
                          double d_max, bool include_workload = false,
                          double w_max = 0.0);

// alpha_ij = 1 / (1 + ||X_i - X_j||) off-diagonal, zero on the diagonal.
Tensor adjacency_from_features(const Tensor& features);

// [I, L, L^2, ..., L^K] with L = D - A.
std::vector<Tensor> laplacian_powers(const Tensor& adjacency, int filter_degree);

}  // namespace capam
