#pragma once

#include <functional>

namespace slcp {

struct WolfeResult {
  double step = 0.0;
  double value = 0.0;     ///< f(step)
  bool satisfied = false; ///< both Wolfe conditions hold at step
  bool decrease = false;  ///< sufficient decrease holds at step (step > 0)
  int evals = 0;
};

/// Weak Wolfe step along a descent direction, by bracketing and bisection.
/// f(s) and g(s) are the value and directional derivative along the ray;
/// f0 = f(0), g0 = g(0) < 0. After max_evals trials without success, the
/// trial with the lowest f among those with sufficient decrease is returned
/// (step 0 with decrease = false if there is none).
WolfeResult wolfe_search(const std::function<double(double)>& f,
                         const std::function<double(double)>& g, double f0, double g0, double c1,
                         double c2, double s_init = 1.0, int max_evals = 60);

}  // namespace slcp
