#include "capam/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace capam {

GradCheckResult grad_check(
    const std::function<double(ParamStore&, bool collect_grads)>& loss,
    ParamStore& params, double h) {
  params.zero_grads();
  loss(params, true);

  // Snapshot analytic gradients; FD evaluations must not depend on them.
  std::map<std::string, Tensor> analytic;
  for (const auto& [name, p] : params.items())
    if (p.trainable) analytic.emplace(name, p.grad);

  GradCheckResult res;
  for (auto& [name, p] : params.items()) {
    if (!p.trainable) continue;
    const Tensor& ga = analytic.at(name);
    for (int i = 0; i < p.value.size(); ++i) {
      const double orig = p.value.data[i];
      p.value.data[i] = orig + h;
      const double fp = loss(params, false);
      p.value.data[i] = orig - h;
      const double fm = loss(params, false);
      p.value.data[i] = orig;
      const double fd = (fp - fm) / (2.0 * h);
      const double a = ga.data[i];
      const double scale = std::max({std::abs(a), std::abs(fd), 1e-6});
      const double rel = std::abs(a - fd) / scale;
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = name;
        res.worst_index = i;
      }
    }
  }
  return res;
}

}  // namespace capam
