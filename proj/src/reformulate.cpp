#include "slcp/reformulate.hpp"

#include <fmt/format.h>

#include "slcp/error.hpp"

namespace slcp {

Vec MixPoint::pack() const {
  Vec z(x_m.size() + u.size() + 1);
  z << x_m, u, t;
  return z;
}

MixPoint MixPoint::unpack(const ConeDims& dims, const Eigen::Ref<const Vec>& z) {
  if (z.size() != dims.k + dims.l + 1) {
    throw InvalidInput(
        fmt::format("MixPoint: expected {} entries, got {}", dims.k + dims.l + 1, z.size()));
  }
  return {z.head(dims.k), z.segment(dims.k, dims.l), z[dims.k + dims.l]};
}

void check_point(const ConeDims& dims, const MixPoint& p, const char* what) {
  if (p.x_m.size() != dims.k || p.u.size() != dims.l) {
    throw InvalidInput(fmt::format("{}: expected x_m of length {} and u of length {}, got {} and {}",
                                   what, dims.k, dims.l, p.x_m.size(), p.u.size()));
  }
}

namespace {

void check_realization(const ConeDims& dims, const Realization& re, const char* what) {
  if (re.T.rows() != dims.m() || re.T.cols() != dims.m() || re.r.size() != dims.m()) {
    throw InvalidInput(fmt::format("{}: realization does not match k={}, l={}", what, dims.k, dims.l));
  }
}

}  // namespace

Vec f1_eval(const ConeDims& dims, const Realization& re, const MixPoint& p) {
  check_point(dims, p, "f1_eval");
  check_realization(dims, re, "f1_eval");
  const Vec x = p.x_m.array() + p.t;
  return re.A(dims) * x + re.B(dims) * p.u + re.p(dims);
}

Vec f1_eval(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  return f1_eval(spec.dims, realize(spec, omega), p);
}

Vec f2_eval(const ConeDims& dims, const Realization& re, const MixPoint& p) {
  check_point(dims, p, "f2_eval");
  check_realization(dims, re, "f2_eval");
  const Vec x = p.x_m.array() + p.t;
  const double ey = (re.A(dims) * x + re.B(dims) * p.u + re.p(dims)).sum();
  Vec out(dims.l + 1);
  out.head(dims.l) = p.t * (re.C(dims) * x + re.D(dims) * p.u + re.q(dims)) + ey * p.u;
  out[dims.l] = p.t * p.t - p.u.squaredNorm();
  return out;
}

Vec f2_eval(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  return f2_eval(spec.dims, realize(spec, omega), p);
}

JacobianBlocks jacobian_blocks(const ConeDims& dims, const Realization& re, const MixPoint& p) {
  check_point(dims, p, "jacobian_blocks");
  check_realization(dims, re, "jacobian_blocks");
  const int k = dims.k;
  const int l = dims.l;
  const auto A = re.A(dims);
  const auto B = re.B(dims);
  const auto C = re.C(dims);
  const auto D = re.D(dims);
  const Vec x = p.x_m.array() + p.t;
  const Eigen::RowVectorXd eA = A.colwise().sum();
  const Eigen::RowVectorXd eB = B.colwise().sum();
  const Vec Ae = A.rowwise().sum();
  const Vec Ce = C.rowwise().sum();

  JacobianBlocks J;
  J.A_tilde = A;

  J.B_tilde.resize(k, l + 1);
  J.B_tilde.leftCols(l) = B;
  J.B_tilde.col(l) = Ae;

  J.C_tilde = Mat::Zero(l + 1, k);
  J.C_tilde.topRows(l) = p.t * C + p.u * eA;

  J.D_tilde = Mat::Zero(l + 1, l + 1);
  const double ey = (A * x + B * p.u + re.p(dims)).sum();
  J.D_tilde.topLeftCorner(l, l) = ey * Mat::Identity(l, l) + p.u * eB + p.t * D;
  // d/dt of the first F2 block; q(w) enters through t (Du + q)
  J.D_tilde.col(l).head(l) = C * x + p.t * Ce + p.u * eA.sum() + D * p.u + re.q(dims);
  J.D_tilde.row(l).head(l) = -2.0 * p.u.transpose();
  J.D_tilde(l, l) = 2.0 * p.t;
  return J;
}

JacobianBlocks jacobian_blocks(const ProblemSpec& spec, const Vec& omega, const MixPoint& p) {
  return jacobian_blocks(spec.dims, realize(spec, omega), p);
}

ConePoint recover_lcp_point(const MixPoint& p) { return {p.x_m.array() + p.t, p.u}; }

MixPoint init_from_lcp(const Vec& x, const Vec& u) {
  const double t = u.norm();
  return {x.array() - t, u, t};
}

}  // namespace slcp
