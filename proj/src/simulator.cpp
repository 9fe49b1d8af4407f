#include "capam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capam {

int SimState::active_count() const {
  int n = 0;
  for (TaskStatus s : task_status)
    if (s == TaskStatus::Active) ++n;
  return n;
}

bool SimState::claimed(int task) const {
  for (const RobotState& r : robots)
    if (r.destination == task) return true;
  return false;
}

SimState Simulator::reset(const ProblemInstance& inst) {
  inst.validate();
  SimState s;
  s.t = 0.0;
  s.task_status.assign(inst.num_tasks(), TaskStatus::Active);
  s.finish_time.assign(inst.num_tasks(), 0.0);
  s.robots.resize(inst.num_robots());
  for (int j = 0; j < inst.num_robots(); ++j) {
    s.robots[j].x = inst.robots[j].x;
    s.robots[j].y = inst.robots[j].y;
    s.robots[j].destination = -1;
    s.robots[j].busy_until = 0.0;
  }
  for (int j = 0; j < inst.num_robots(); ++j)
    s.queue.push_back({0.0, j});
  return s;
}

Simulator::Simulator(const ProblemInstance& inst) : inst_(&inst) {
  state_ = reset(inst);
  partial_.penalties.assign(inst.num_tasks(), 0.0);
}

void Simulator::advance_to(double t) {
  if (t < state_.t)
    throw std::logic_error("simulator: clock would move backwards");
  state_.t = t;
  // Unclaimed active tasks whose deadline has strictly passed can no longer
  // be completed on time by anyone who has not already committed; they are
  // marked missed. A task claimed before its deadline still completes (late).
  for (int i = 0; i < inst_->num_tasks(); ++i) {
    if (state_.task_status[i] != TaskStatus::Active) continue;
    if (state_.claimed(i)) continue;
    if (inst_->tasks[i].deadline < t) state_.task_status[i] = TaskStatus::Missed;
  }
}

void Simulator::pop_event(DecisionEvent ev) {
  auto it = std::find_if(state_.queue.begin(), state_.queue.end(),
                         [&](const DecisionEvent& e) {
                           return e.time == ev.time && e.robot == ev.robot;
                         });
  state_.queue.erase(it);
}

std::optional<DecisionEvent> Simulator::next_decision() {
  if (pending_robot_ != -1)
    throw std::logic_error("simulator: previous decision still pending");
  while (!state_.queue.empty()) {
    DecisionEvent ev = *std::min_element(
        state_.queue.begin(), state_.queue.end(),
        [](const DecisionEvent& a, const DecisionEvent& b) {
          return a.time != b.time ? a.time < b.time : a.robot < b.robot;
        });
    pop_event(ev);
    advance_to(ev.time);
    RobotState& r = state_.robots[ev.robot];
    if (r.destination >= 0) {
      // Arrival event: the robot finishes serving its destination.
      const int task = r.destination;
      state_.task_status[task] = TaskStatus::Completed;
      state_.finish_time[task] = ev.time;
      r.x = inst_->tasks[task].x;
      r.y = inst_->tasks[task].y;
      r.destination = -1;
    }
    if (terminated()) return std::nullopt;
    pending_robot_ = ev.robot;
    return ev;
  }
  return std::nullopt;
}

std::vector<bool> Simulator::feasible_mask() const {
  std::vector<bool> mask(inst_->num_tasks(), false);
  for (int i = 0; i < inst_->num_tasks(); ++i)
    mask[i] = state_.task_status[i] == TaskStatus::Active && !state_.claimed(i);
  return mask;
}

void Simulator::assign(int robot, int task) {
  if (robot != pending_robot_)
    throw std::logic_error("simulator: robot " + std::to_string(robot) +
                           " is not the pending decider");
  if (task < 0 || task >= inst_->num_tasks() ||
      state_.task_status[task] != TaskStatus::Active || state_.claimed(task))
    throw std::logic_error("simulator: task " + std::to_string(task) +
                           " is not feasible");
  RobotState& r = state_.robots[robot];
  const TaskNode& tn = inst_->tasks[task];
  const double travel = euclidean(r.x, r.y, tn.x, tn.y) / inst_->speed;
  const double service = tn.workload / inst_->robots[robot].capacity;
  const double finish = state_.t + travel + service;
  r.destination = task;
  r.busy_until = finish;
  state_.queue.push_back({finish, robot});
  partial_.visit_sequence.push_back(task);
  partial_.decisions.push_back({state_.t, robot, task, 0.0});
  pending_robot_ = -1;
}

void Simulator::skip(int robot) {
  if (robot != pending_robot_)
    throw std::logic_error("simulator: robot " + std::to_string(robot) +
                           " is not the pending decider");
  pending_robot_ = -1;
}

void episode_cost(const ProblemInstance& inst, const SimState& state,
                  EpisodeResult& result) {
  if (state.active_count() != 0)
    throw std::logic_error("episode_cost: episode has active tasks");
  const int n = inst.num_tasks();
  result.penalties.assign(n, 0.0);
  result.completed_on_time = result.completed_late = result.missed = 0;
  for (int i = 0; i < n; ++i) {
    switch (state.task_status[i]) {
      case TaskStatus::Completed:
        if (state.finish_time[i] > inst.tasks[i].deadline) {
          result.penalties[i] = state.finish_time[i] / inst.tasks[i].deadline;
          ++result.completed_late;
        } else {
          ++result.completed_on_time;
        }
        break;
      case TaskStatus::Missed:
        result.penalties[i] = 1.0;
        ++result.missed;
        break;
      case TaskStatus::Active:
        break;
    }
  }
  result.cost = 0.0;
  for (double r : result.penalties) result.cost += r;
}

EpisodeResult Simulator::finish() const {
  EpisodeResult res = partial_;
  episode_cost(*inst_, state_, res);
  res.sum_log_prob = 0.0;
  for (const Decision& d : res.decisions) res.sum_log_prob += d.log_prob;
  return res;
}

std::pair<int, double> select_action(const std::vector<double>& probs,
                                     const std::vector<bool>& feasible, SelectMode mode,
                                     Rng& rng) {
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0)
      throw std::runtime_error("policy produced an invalid probability");
    if (!feasible[i] && probs[i] != 0.0)
      throw std::runtime_error("policy placed probability on an infeasible task");
  }
  int chosen = -1;
  if (mode == SelectMode::Greedy) {
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (!feasible[i]) continue;
      if (probs[i] > best) {
        best = probs[i];
        chosen = i;
      }
    }
  } else {
    const double u = rng.uniform();
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!feasible[i]) continue;
      cum += probs[i];
      if (u < cum) {
        chosen = i;
        break;
      }
      chosen = i;  // guards against cum < 1 from rounding
    }
  }
  if (chosen < 0) throw std::runtime_error("select_action: no feasible task");
  return {chosen, std::log(probs[chosen])};
}

EpisodeResult run_episode(const ProblemInstance& inst, TaskPolicy& policy,
                          SelectMode mode, uint64_t seed) {
  Simulator sim(inst);
  policy.begin_episode(inst);
  Rng rng(seed);
  while (auto ev = sim.next_decision()) {
    const std::vector<bool> mask = sim.feasible_mask();
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
      sim.skip(ev->robot);
      continue;
    }
    const std::vector<double> probs = policy.action_probabilities(sim.state(), ev->robot, mask);
    auto [task, logp] = select_action(probs, mask, mode, rng);
    sim.assign(ev->robot, task);
  }
  return sim.finish();
}

EpisodeResult execute_sequences(const ProblemInstance& inst,
                                const std::vector<std::vector<int>>& sequences) {
  if (static_cast<int>(sequences.size()) != inst.num_robots())
    throw std::invalid_argument("execute_sequences: one sequence per robot required");
  std::vector<int> seen(inst.num_tasks(), 0);
  for (const auto& seq : sequences)
    for (int t : seq) {
      if (t < 0 || t >= inst.num_tasks())
        throw std::invalid_argument("execute_sequences: task index out of range");
      if (seen[t]++)
        throw std::invalid_argument("execute_sequences: task " + std::to_string(t) +
                                    " listed twice");
    }
  Simulator sim(inst);
  std::vector<size_t> cursor(inst.num_robots(), 0);
  while (auto ev = sim.next_decision()) {
    const std::vector<bool> mask = sim.feasible_mask();
    const auto& seq = sequences[ev->robot];
    size_t& c = cursor[ev->robot];
    while (c < seq.size() && !mask[seq[c]]) ++c;  // expired entries are skipped
    if (c == seq.size()) {
      sim.skip(ev->robot);
      continue;
    }
    sim.assign(ev->robot, seq[c++]);
  }
  return sim.finish();
}

std::vector<double> UniformRandomPolicy::action_probabilities(
    const SimState& state, int robot, const std::vector<bool>& feasible) {
  int count = 0;
  for (bool b : feasible)
    if (b) ++count;
  std::vector<double> p(feasible.size(), 0.0);
  for (size_t i = 0; i < feasible.size(); ++i)
    if (feasible[i]) p[i] = 1.0 / count;
  return p;
}

}  // namespace capam
