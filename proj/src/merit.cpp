#include "slcp/merit.hpp"

#include <cmath>

#include <fmt/format.h>

#include "slcp/error.hpp"

namespace slcp {

double fb_psi(double a, double b) { return std::hypot(a, b) - (a + b); }

std::pair<double, double> fb_grad(double a, double b) {
  const double r = std::hypot(a, b);
  if (r == 0.0) return {-1.0, -1.0};
  return {a / r - 1.0, b / r - 1.0};
}

Vec residual(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  check_point(spec.dims, p, "residual");
  ScenarioEvaluator ev(spec);
  ev.evaluate(omega, p.pack(), false);
  return ev.residual();
}

double merit_theta(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  return 0.5 * residual(spec, omega, p).squaredNorm();
}

Mat merit_jacobian(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  const auto& d = spec.dims;
  const Realization re = realize(spec, omega);
  const JacobianBlocks blk = jacobian_blocks(d, re, p);
  const Vec f1 = f1_eval(d, re, p);

  Vec da(d.k);
  Vec db(d.k);
  for (int i = 0; i < d.k; ++i) std::tie(da[i], db[i]) = fb_grad(p.x_m[i], f1[i]);

  const int n = d.k + d.l + 1;
  Mat out(n, n);
  out.topLeftCorner(d.k, d.k) = db.asDiagonal() * blk.A_tilde;
  out.topLeftCorner(d.k, d.k).diagonal() += da;
  out.topRightCorner(d.k, d.l + 1) = db.asDiagonal() * blk.B_tilde;
  out.bottomLeftCorner(d.l + 1, d.k) = blk.C_tilde;
  out.bottomRightCorner(d.l + 1, d.l + 1) = blk.D_tilde;
  return out;
}

Vec merit_grad(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  check_point(spec.dims, p, "merit_grad");
  ScenarioEvaluator ev(spec);
  ev.evaluate(omega, p.pack(), true);
  return ev.jacobian().transpose() * ev.residual();
}

ScenarioEvaluator::ScenarioEvaluator(const ProblemSpec& spec)
    : spec_(&spec),
      x_(spec.dims.k),
      f1_(spec.dims.k),
      residual_(spec.dims.k + spec.dims.l + 1),
      jacobian_(spec.dims.k + spec.dims.l + 1, spec.dims.k + spec.dims.l + 1) {
  re_.T = spec.T_base;
  re_.r = spec.r_base;
}

void ScenarioEvaluator::evaluate(const Eigen::Ref<const Vec>& omega, const Eigen::Ref<const Vec>& z,
                                 bool with_jacobian) {
  const ConeDims& d = spec_->dims;
  const int k = d.k;
  const int l = d.l;
  if (z.size() != k + l + 1) {
    throw InvalidInput(fmt::format("evaluate: point has length {}, expected {}", z.size(), k + l + 1));
  }
  realize_into(*spec_, omega, re_);

  const auto xm = z.head(k);
  const auto u = z.segment(k, l);
  const double t = z[k + l];
  const auto A = re_.A(d);
  const auto B = re_.B(d);
  const auto C = re_.C(d);
  const auto D = re_.D(d);

  x_ = xm.array() + t;
  f1_.noalias() = A * x_;
  f1_.noalias() += B * u;
  f1_ += re_.p(d);
  const double ey = f1_.sum();

  for (int i = 0; i < k; ++i) residual_[i] = fb_psi(xm[i], f1_[i]);
  auto r2 = residual_.segment(k, l);
  r2.noalias() = C * x_;
  r2.noalias() += D * u;
  r2 += re_.q(d);
  r2 *= t;
  r2 += ey * u;
  residual_[k + l] = t * t - u.squaredNorm();

  if (!with_jacobian) return;

  // FB rows: diag(da) + diag(db) [A | B | Ae]
  for (int i = 0; i < k; ++i) {
    const auto [da, db] = fb_grad(xm[i], f1_[i]);
    jacobian_.row(i).head(k) = db * A.row(i);
    jacobian_(i, i) += da;
    jacobian_.row(i).segment(k, l) = db * B.row(i);
    jacobian_(i, k + l) = db * A.row(i).sum();
  }
  // F2 block
  jacobian_.block(k, 0, l, k).noalias() = t * C;
  jacobian_.block(k, 0, l, k).noalias() += u * A.colwise().sum();
  jacobian_.block(k, k, l, l).noalias() = t * D;
  jacobian_.block(k, k, l, l).noalias() += u * B.colwise().sum();
  jacobian_.block(k, k, l, l).diagonal().array() += ey;
  auto dt = jacobian_.col(k + l).segment(k, l);
  dt.noalias() = C * x_;
  dt.noalias() += t * C.rowwise().sum();
  dt += A.sum() * u;
  dt.noalias() += D * u;
  dt += re_.q(d);
  // t^2 - |u|^2
  jacobian_.row(k + l).head(k).setZero();
  jacobian_.row(k + l).segment(k, l) = -2.0 * u.transpose();
  jacobian_(k + l, k + l) = 2.0 * t;
}

}  // namespace slcp
