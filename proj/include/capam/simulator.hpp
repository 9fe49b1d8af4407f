#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "capam/instance.hpp"
#include "capam/rng.hpp"

namespace capam {

enum class TaskStatus { Active, Completed, Missed };

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  int destination = -1;      // task index while traveling/serving, -1 if idle
  double busy_until = 0.0;   // finish time of the current assignment
};

struct DecisionEvent {
  double time = 0.0;
  int robot = -1;
};

// Mutable episode state. Owned by one Simulator; statuses never revert and
// the clock never decreases.
struct SimState {
  double t = 0.0;
  std::vector<TaskStatus> task_status;
  std::vector<double> finish_time;  // t_i^f, set when a task completes
  std::vector<RobotState> robots;
  std::vector<DecisionEvent> queue;  // kept sorted by (time, robot)

  int active_count() const;
  bool claimed(int task) const;
};

struct Decision {
  double time = 0.0;
  int robot = -1;
  int task = -1;
  double log_prob = 0.0;
};

struct EpisodeResult {
  std::vector<int> visit_sequence;     // tasks in assignment order, no repeats
  std::vector<double> penalties;       // per-task r_i
  double cost = 0.0;                   // sum of penalties
  double sum_log_prob = 0.0;
  std::vector<Decision> decisions;
  int completed_on_time = 0;
  int completed_late = 0;
  int missed = 0;

  double completion_percent(int num_tasks) const {
    return 100.0 * completed_on_time / num_tasks;
  }
};

// Event-driven TAPTC environment. A robot reaching its task (or the start of
// the mission) triggers a decision event; between events, unclaimed active
// tasks whose deadline has passed are marked missed. Simultaneous events are
// ordered by robot index.
class Simulator {
 public:
  explicit Simulator(const ProblemInstance& inst);

  // Advances the clock to the next decision event, completing the deciding
  // robot's task on arrival, and returns the event. Returns nullopt once no
  // event remains or every task is resolved.
  std::optional<DecisionEvent> next_decision();

  // Feasible = active and not another robot's current destination.
  std::vector<bool> feasible_mask() const;

  // Assigns `task` to `robot` (must be the pending decider and feasible).
  void assign(int robot, int task);

  // The pending decider idles permanently (no requeue).
  void skip(int robot);

  bool terminated() const { return state_.active_count() == 0; }

  // Final per-task penalties and cost. Throws if tasks are still active.
  EpisodeResult finish() const;

  const SimState& state() const { return state_; }
  const ProblemInstance& instance() const { return *inst_; }

  // Fresh initial state for an instance (validates it).
  static SimState reset(const ProblemInstance& inst);

 private:
  void advance_to(double t);
  void pop_event(DecisionEvent ev);

  const ProblemInstance* inst_;
  SimState state_;
  EpisodeResult partial_;
  int pending_robot_ = -1;  // robot returned by next_decision, awaiting assign/skip
};

// Per-task penalties for a terminated episode: 0 on time, t_f/d when late,
// 1 for tasks that expired unvisited.
void episode_cost(const ProblemInstance& inst, const SimState& state,
                  EpisodeResult& result);

// Distribution-based action selector. Implementations return selection
// probabilities over all tasks; infeasible tasks must have probability 0.
class TaskPolicy {
 public:
  virtual ~TaskPolicy() = default;
  virtual void begin_episode(const ProblemInstance& inst) {}
  virtual std::vector<double> action_probabilities(const SimState& state, int robot,
                                                   const std::vector<bool>& feasible) = 0;
};

enum class SelectMode { Greedy, Sample };

// Runs decision events until no task is active. Greedy mode takes the argmax
// (lowest index on ties); sample mode draws from the distribution with a
// generator seeded by `seed`.
EpisodeResult run_episode(const ProblemInstance& inst, TaskPolicy& policy,
                          SelectMode mode, uint64_t seed = 0);

// Executes prescribed per-robot task sequences through the same event engine.
// Tasks that expired before their turn are skipped; tasks not listed anywhere
// simply expire. Sequences must not repeat a task.
EpisodeResult execute_sequences(const ProblemInstance& inst,
                                const std::vector<std::vector<int>>& sequences);

// Uniform distribution over feasible tasks.
class UniformRandomPolicy : public TaskPolicy {
 public:
  std::vector<double> action_probabilities(const SimState& state, int robot,
                                           const std::vector<bool>& feasible) override;
};

// Greedy/sampled selection from a distribution; returns (index, log-prob).
std::pair<int, double> select_action(const std::vector<double>& probs,
                                     const std::vector<bool>& feasible, SelectMode mode,
                                     Rng& rng);

}  // namespace capam
