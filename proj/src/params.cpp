#include "capam/params.hpp"

#include <cmath>
#include <stdexcept>

namespace capam {

Tensor& ParamStore::add(const std::string& name, Tensor init, bool trainable) {
  auto [it, inserted] = items_.emplace(name, Param{});
  if (!inserted) throw std::invalid_argument("ParamStore: duplicate name " + name);
  it->second.value = std::move(init);
  it->second.grad = Tensor(it->second.value.rows, it->second.value.cols, 0.0);
  it->second.trainable = trainable;
  return it->second.value;
}

Param& ParamStore::param(const std::string& name) {
  auto it = items_.find(name);
  if (it == items_.end()) throw std::out_of_range("ParamStore: unknown name " + name);
  return it->second;
}

Tensor& ParamStore::value(const std::string& name) { return param(name).value; }

const Tensor& ParamStore::value(const std::string& name) const {
  auto it = items_.find(name);
  if (it == items_.end()) throw std::out_of_range("ParamStore: unknown name " + name);
  return it->second.value;
}

Tensor& ParamStore::grad(const std::string& name) { return param(name).grad; }

void ParamStore::zero_grads() {
  for (auto& [name, p] : items_)
    std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
}

double ParamStore::grad_norm() const {
  double ss = 0.0;
  for (const auto& [name, p] : items_) {
    if (!p.trainable) continue;
    for (double g : p.grad.data) ss += g * g;
  }
  return std::sqrt(ss);
}

void ParamStore::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (norm <= max_norm || norm == 0.0) return;
  const double s = max_norm / norm;
  for (auto& [name, p] : items_) {
    if (!p.trainable) continue;
    for (double& g : p.grad.data) g *= s;
  }
}

size_t ParamStore::trainable_count() const {
  size_t n = 0;
  for (const auto& [name, p] : items_)
    if (p.trainable) n += p.value.size();
  return n;
}

Tensor uniform_init(int rows, int cols, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(rows, cols);
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

int ParamBinder::operator()(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  int id = tape_.leaf(store_.value(name));
  bound_.emplace(name, id);
  return id;
}

void ParamBinder::accumulate_grads() {
  for (const auto& [name, id] : bound_) {
    const Tensor& g = tape_.grad(id);
    Tensor& acc = store_.grad(name);
    for (int i = 0; i < g.size(); ++i) acc.data[i] += g.data[i];
  }
}

}  // namespace capam
