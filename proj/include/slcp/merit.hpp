#pragma once

#include <utility>

#include "slcp/problem.hpp"
#include "slcp/reformulate.hpp"

namespace slcp {

/// Fischer-Burmeister function sqrt(a^2 + b^2) - (a + b).
double fb_psi(double a, double b);

/// (d psi/da, d psi/db); (-1, -1) at the origin where psi is not differentiable.
std::pair<double, double> fb_grad(double a, double b);

/// Stacked FB residual: psi((x_m)_i, (F1)_i) for i < k, then the l + 1 entries of F2.
Vec residual(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

/// 0.5 * |residual|^2.
double merit_theta(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

/// Jacobian of the residual w.r.t. (x_m, u, t), assembled from JacobianBlocks:
/// [[Da + Db A~, Db B~], [C~, D~]] with Da, Db the FB partials per row.
Mat merit_jacobian(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

/// jacobian' * residual.
Vec merit_grad(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

/// Residual and Jacobian for one scenario with preallocated storage. This is
/// the per-sample kernel of the SAA objective; one instance per thread.
class ScenarioEvaluator {
 public:
  explicit ScenarioEvaluator(const ProblemSpec& spec);

  /// Evaluates at packed point z = (x_m, u, t) and outcome omega.
  void evaluate(const Eigen::Ref<const Vec>& omega, const Eigen::Ref<const Vec>& z,
                bool with_jacobian);

  const Vec& residual() const { return residual_; }
  const Mat& jacobian() const { return jacobian_; }
  double theta() const { return 0.5 * residual_.squaredNorm(); }

 private:
  const ProblemSpec* spec_;
  Realization re_;
  Vec x_;
  Vec f1_;
  Vec residual_;
  Mat jacobian_;
};

}  // namespace slcp
