#include "slcp/line_search.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "slcp/error.hpp"

namespace slcp {

WolfeResult wolfe_search(const std::function<double(double)>& f,
                         const std::function<double(double)>& g, double f0, double g0, double c1,
                         double c2, double s_init, int max_evals) {
  if (!(g0 < 0.0)) {
    throw InvalidInput(fmt::format("wolfe_search: not a descent direction (g(0) = {})", g0));
  }
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
    throw InvalidInput(fmt::format("wolfe_search: need 0 < c1 < c2 < 1, got {}, {}", c1, c2));
  }
  if (!(s_init > 0.0)) throw InvalidInput("wolfe_search: initial step must be positive");

  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = inf;
  double s = s_init;
  WolfeResult best;
  best.value = f0;

  for (int n = 1; n <= max_evals; ++n) {
    const double fs = f(s);
    best.evals = n;
    const bool sd = std::isfinite(fs) && fs <= f0 + c1 * s * g0;
    if (!sd) {
      hi = s;
    } else {
      if (!best.decrease || fs < best.value ||
          (fs == best.value && s > best.step)) {
        best.step = s;
        best.value = fs;
        best.decrease = true;
      }
      const double gs = g(s);
      if (std::isfinite(gs) && gs >= c2 * g0) {
        return {s, fs, true, true, n};
      }
      lo = s;
    }
    const double next = hi == inf ? 2.0 * s : 0.5 * (lo + hi);
    if (next == s || next <= lo || (hi != inf && next >= hi)) break;
    s = next;
  }
  return best;
}

}  // namespace slcp
