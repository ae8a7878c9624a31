#pragma once

#include <map>
#include <string>
#include <vector>

#include "pgorder/nn/model.hpp"
#include "pgorder/nn/params.hpp"

namespace pgorder::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::map<std::string, double> group_max;  // per parameter matrix
  // Parameter matrices whose analytic gradient is identically zero on the sample.
  std::vector<std::string> untouched;
  long checked = 0;
  double tolerance = 1e-4;

  bool passed() const { return max_rel_error < tolerance; }
};

/// Compares the backpropagated gradient of sample_loss with central
/// differences (+-eps) for every scalar parameter. The error of one entry is
/// |a - n| / max(|a|, |n|, 1e-6).
GradCheckReport grad_check(const GraphSample& sample, const ParamStore<double>& params, int steps,
                           double eps = 1e-5, double tolerance = 1e-4);

}  // namespace pgorder::nn
