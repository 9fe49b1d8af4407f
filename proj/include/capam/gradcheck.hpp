#pragma once

#include <functional>
#include <string>

#include "capam/params.hpp"

namespace capam {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int worst_index = -1;
};

// Compares the tape gradient of a scalar loss against central finite
// differences over every trainable entry of `params`.
//
// `loss` must be deterministic given the parameter values: it is called once
// with collect_grads=true (and must leave d(loss)/d(param) in the stores'
// grad buffers) and then re-evaluated at perturbed values with
// collect_grads=false. Parameter values are restored afterwards.
GradCheckResult grad_check(
    const std::function<double(ParamStore&, bool collect_grads)>& loss,
    ParamStore& params, double h = 1e-5);

}  // namespace capam
