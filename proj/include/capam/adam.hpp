#pragma once

#include <map>
#include <string>

#include "capam/params.hpp"

namespace capam {

// Adam with bias correction. Moment buffers are keyed by parameter name and
// created lazily on the first step; one shared step counter.
class Adam {
 public:
  explicit Adam(double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one update from the accumulated gradients of every trainable
  // parameter. Throws on non-finite gradients, naming the parameter.
  void step(ParamStore& params);

  long step_count() const { return step_; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  struct Moments {
    Tensor m;
    Tensor v;
  };

  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace capam
