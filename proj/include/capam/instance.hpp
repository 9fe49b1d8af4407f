#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace capam {

struct TaskNode {
  double x = 0.0;
  double y = 0.0;
  double deadline = 0.0;
  double workload = 0.0;
};

struct RobotSpec {
  double x = 0.0;
  double y = 0.0;
  double capacity = 1.0;  // work-rate: service time is workload / capacity
};

struct InstanceMeta {
  std::string suite;
  std::string group;       // "tight" | "slack" | ""
  int normal_fraction = 0;  // percent of tasks with truncated-normal deadlines
  uint64_t seed = 0;
};

// One sampled task-allocation scenario: tasks with deadlines and workloads,
// robots with work capacities, a shared grid and travel speed.
struct ProblemInstance {
  std::vector<TaskNode> tasks;
  std::vector<RobotSpec> robots;
  double speed = 1.0;
  double grid = 100.0;
  InstanceMeta meta;

  int num_tasks() const { return static_cast<int>(tasks.size()); }
  int num_robots() const { return static_cast<int>(robots.size()); }

  double max_deadline() const {
    double d = 0.0;
    for (const TaskNode& t : tasks) d = std::max(d, t.deadline);
    return d;
  }

  double max_workload() const {
    double w = 0.0;
    for (const TaskNode& t : tasks) w = std::max(w, t.workload);
    return w;
  }

  // Throws std::invalid_argument describing the first violated bound.
  void validate() const;
};

inline double euclidean(double ax, double ay, double bx, double by) {
  const double dx = ax - bx;
  const double dy = ay - by;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace capam
