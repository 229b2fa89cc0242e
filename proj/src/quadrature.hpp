#pragma once

#include <functional>
#include <vector>

namespace wetfb {

struct QuadOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;          // 0: purely relative target
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;        // estimated, not guaranteed
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7-15 integration over [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Same, seeded with the consecutive segments defined by `breaks`
// (sorted, at least two entries). Adaptivity is global across segments.
QuadResult integrate_segmented(const std::function<double(double)>& f,
                               const std::vector<double>& breaks,
                               const QuadOptions& opt = {});

}  // namespace wetfb
