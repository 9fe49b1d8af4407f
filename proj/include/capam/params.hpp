#pragma once

#include <map>
#include <string>
#include <vector>

#include "capam/rng.hpp"
#include "capam/tape.hpp"
#include "capam/tensor.hpp"

namespace capam {

struct Param {
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

// Named parameter set. Iteration order is the lexicographic name order, so
// every walk over the store is deterministic.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Tensor init, bool trainable = true);
  bool has(const std::string& name) const { return items_.count(name) > 0; }
  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);
  Param& param(const std::string& name);

  void zero_grads();
  double grad_norm() const;                  // global L2 over trainable entries
  void clip_grad_norm(double max_norm);
  size_t trainable_count() const;

  std::map<std::string, Param>& items() { return items_; }
  const std::map<std::string, Param>& items() const { return items_; }

 private:
  std::map<std::string, Param> items_;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weight init.
Tensor uniform_init(int rows, int cols, int fan_in, Rng& rng);

// Binds store entries as tape leaves, one leaf per name per tape, and routes
// tape gradients back into the store after backward().
class ParamBinder {
 public:
  ParamBinder(Tape& tape, ParamStore& store) : tape_(tape), store_(store) {}

  int operator()(const std::string& name);

  // Accumulate tape gradients of every bound parameter into the store.
  void accumulate_grads();

 private:
  Tape& tape_;
  ParamStore& store_;
  std::map<std::string, int> bound_;
};

}  // namespace capam
