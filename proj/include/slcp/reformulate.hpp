#pragma once

#include "slcp/cone.hpp"
#include "slcp/problem.hpp"

namespace slcp {

/// Variable of the mixed complementarity reformulation. `x_m` is the shifted
/// LCP variable x_lcp - t e, so (x_m, F1) is the orthant-complementary pair
/// and F2 = 0 carries the cone structure. t is free (not sign-constrained).
struct MixPoint {
  Vec x_m;
  Vec u;
  double t = 0.0;

  /// Stacked (x_m, u, t), length k + l + 1.
  Vec pack() const;
  static MixPoint unpack(const ConeDims& dims, const Eigen::Ref<const Vec>& z);
};

/// Partial derivatives of (F1, F2) with respect to (x_m, (u, t)).
struct JacobianBlocks {
  Mat A_tilde;  ///< dF1/dx_m,       k x k
  Mat B_tilde;  ///< dF1/d(u,t),     k x (l+1)
  Mat C_tilde;  ///< dF2/dx_m,       (l+1) x k
  Mat D_tilde;  ///< dF2/d(u,t),     (l+1) x (l+1)
};

void check_point(const ConeDims& dims, const MixPoint& p, const char* what);

/// F1 = A (x_m + t e) + B u + p.
Vec f1_eval(const ConeDims& dims, const Realization& re, const MixPoint& p);
Vec f1_eval(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

/// F2 = ( t (C x + D u + q) + u e'(A x + B u + p) ;  t^2 - |u|^2 ) with x = x_m + t e.
/// The first block is the expanded form [tC + u e'A](x) + u e'(Bu + p) + t(Du + q).
Vec f2_eval(const ConeDims& dims, const Realization& re, const MixPoint& p);
Vec f2_eval(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

JacobianBlocks jacobian_blocks(const ConeDims& dims, const Realization& re, const MixPoint& p);
JacobianBlocks jacobian_blocks(const ProblemSpec& spec, const Vec& omega, const MixPoint& p);

/// (x_m + t e, u).
ConePoint recover_lcp_point(const MixPoint& p);

/// (x - |u| e, u, |u|).
MixPoint init_from_lcp(const Vec& x, const Vec& u);

}  // namespace slcp
