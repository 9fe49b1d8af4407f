#include "capam/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace capam {

void Adam::step(ParamStore& params) {
  for (const auto& [name, p] : params.items()) {
    if (!p.trainable) continue;
    if (!p.grad.all_finite())
      throw std::runtime_error("adam: non-finite gradient for parameter " + name);
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, step_);
  const double bc2 = 1.0 - std::pow(beta2_, step_);
  for (auto& [name, p] : params.items()) {
    if (!p.trainable) continue;
    auto it = moments_.find(name);
    if (it == moments_.end()) {
      Moments mm;
      mm.m = Tensor(p.value.rows, p.value.cols, 0.0);
      mm.v = Tensor(p.value.rows, p.value.cols, 0.0);
      it = moments_.emplace(name, std::move(mm)).first;
    }
    Moments& mom = it->second;
    if (!mom.m.same_shape(p.grad))
      throw std::invalid_argument("adam: gradient shape changed for " + name);
    for (int i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data[i];
      mom.m.data[i] = beta1_ * mom.m.data[i] + (1.0 - beta1_) * g;
      mom.v.data[i] = beta2_ * mom.v.data[i] + (1.0 - beta2_) * g * g;
      const double mhat = mom.m.data[i] / bc1;
      const double vhat = mom.v.data[i] / bc2;
      p.value.data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

}  // namespace capam
