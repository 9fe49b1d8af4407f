#include "capam/instance.hpp"

#include <stdexcept>

namespace capam {

void ProblemInstance::validate() const {
  if (tasks.empty()) throw std::invalid_argument("instance: no tasks");
  if (robots.empty()) throw std::invalid_argument("instance: no robots");
  if (!(speed > 0.0)) throw std::invalid_argument("instance: speed must be positive");
  if (!(grid > 0.0)) throw std::invalid_argument("instance: grid must be positive");
  for (size_t i = 0; i < tasks.size(); ++i) {
    const TaskNode& t = tasks[i];
    if (t.x < 0.0 || t.x > grid || t.y < 0.0 || t.y > grid)
      throw std::invalid_argument("instance: task " + std::to_string(i) + " outside grid");
    if (!(t.deadline > 0.0))
      throw std::invalid_argument("instance: task " + std::to_string(i) +
                                  " deadline must be positive");
    if (!(t.workload > 0.0))
      throw std::invalid_argument("instance: task " + std::to_string(i) +
                                  " workload must be positive");
  }
  for (size_t j = 0; j < robots.size(); ++j) {
    const RobotSpec& r = robots[j];
    if (r.x < 0.0 || r.x > grid || r.y < 0.0 || r.y > grid)
      throw std::invalid_argument("instance: robot " + std::to_string(j) + " outside grid");
    if (r.capacity < 1.0 || r.capacity > 3.0)
      throw std::invalid_argument("instance: robot " + std::to_string(j) +
                                  " capacity outside [1, 3]");
  }
}

}  // namespace capam
