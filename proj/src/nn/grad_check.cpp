#include "pgorder/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace pgorder::nn {

GradCheckReport grad_check(const GraphSample& sample, const ParamStore<double>& params, int steps, double eps,
                           double tolerance) {
  GradCheckReport report;
  report.tolerance = tolerance;
  auto grads = ParamStore<double>::zeros_like(params);
  sample_loss(sample, params, steps, &grads);

  ParamStore<double> probe = params;
  for (std::size_t k = 0; k < probe.entries().size(); ++k) {
    const auto& name = probe.entries()[k].name;
    auto& values = probe.entries()[k].value.data;
    const auto& analytic = grads.entries()[k].value.data;
    double group = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = sample_loss(sample, probe, steps);
      values[i] = saved - eps;
      const double down = sample_loss(sample, probe, steps);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      any = any || a != 0.0;
      group = std::max(group, err);
      ++report.checked;
      if (report.worst_index < 0 || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = name;
        report.worst_index = static_cast<int>(i);
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
    report.group_max[name] = group;
    if (!any) report.untouched.push_back(name);
  }
  return report;
}

}  // namespace pgorder::nn
