#include "capam/task_graph.hpp"

#include <cmath>
#include <stdexcept>

namespace capam {

Tensor normalize_features(const std::vector<TaskNode>& tasks, double grid,
                          double d_max, bool include_workload, double w_max) {
  if (!(grid > 0.0)) throw std::invalid_argument("normalize_features: grid must be positive");
  if (!(d_max > 0.0)) throw std::invalid_argument("normalize_features: d_max must be positive");
  const int n = static_cast<int>(tasks.size());
  const int dim = include_workload ? 4 : 3;
  Tensor x(n, dim);
  for (int i = 0; i < n; ++i) {
    const TaskNode& t = tasks[i];
    if (t.x < 0.0 || t.x > grid || t.y < 0.0 || t.y > grid)
      throw std::invalid_argument("normalize_features: task " + std::to_string(i) +
                                  " outside grid");
    if (t.deadline > d_max)
      throw std::invalid_argument("normalize_features: task " + std::to_string(i) +
                                  " deadline exceeds d_max");
    x.at(i, 0) = t.x / grid;
    x.at(i, 1) = t.y / grid;
    x.at(i, 2) = t.deadline / d_max;
    if (include_workload) {
      if (!(w_max > 0.0))
        throw std::invalid_argument("normalize_features: w_max must be positive");
      x.at(i, 3) = t.workload / w_max;
    }
  }
  return x;
}

Tensor adjacency_from_features(const Tensor& x) {
  const int n = x.rows;
  Tensor a(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double ss = 0.0;
      for (int k = 0; k < x.cols; ++k) {
        const double d = x.at(i, k) - x.at(j, k);
        ss += d * d;
      }
      const double alpha = 1.0 / (1.0 + std::sqrt(ss));
      a.at(i, j) = alpha;
      a.at(j, i) = alpha;
    }
  }
  return a;
}

std::vector<Tensor> laplacian_powers(const Tensor& a, int filter_degree) {
  if (filter_degree < 0) throw std::invalid_argument("laplacian_powers: K must be >= 0");
  const int n = a.rows;
  Tensor lap(n, n);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a.at(i, j);
    for (int j = 0; j < n; ++j) lap.at(i, j) = -a.at(i, j);
    lap.at(i, i) = deg;
  }
  std::vector<Tensor> powers;
  powers.reserve(filter_degree + 1);
  powers.push_back(Tensor::identity(n));
  for (int k = 1; k <= filter_degree; ++k)
    powers.push_back(matmul_val(powers.back(), lap));
  return powers;
}

TaskGraph TaskGraph::build(const ProblemInstance& inst, int filter_degree,
                           bool include_workload) {
  TaskGraph g;
  g.n = inst.num_tasks();
  g.features = normalize_features(inst.tasks, inst.grid, inst.max_deadline(),
                                  include_workload, inst.max_workload());
  g.adjacency = adjacency_from_features(g.features);
  g.degree = Tensor(g.n, g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < g.n; ++j) deg += g.adjacency.at(i, j);
    g.degree.at(i, i) = deg;
  }
  g.laplacian = Tensor(g.n, g.n);
  for (int i = 0; i < g.n * g.n; ++i)
    g.laplacian.data[i] = g.degree.data[i] - g.adjacency.data[i];
  g.l_powers = laplacian_powers(g.adjacency, filter_degree);
  return g;
}

}  // namespace capam
