#include "slcp/cone.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "slcp/error.hpp"

namespace slcp {

namespace {

void check_dims(const ConeDims& dims, const Vec& x, const Vec& u, const char* what) {
  if (dims.k < 1 || dims.l < 1) {
    throw InvalidInput(fmt::format("{}: cone dimensions must be positive (k={}, l={})", what,
                                   dims.k, dims.l));
  }
  if (x.size() != dims.k || u.size() != dims.l) {
    throw InvalidInput(fmt::format("{}: expected x of length {} and u of length {}, got {} and {}",
                                   what, dims.k, dims.l, x.size(), u.size()));
  }
}

// Violations of (a, b) in C(R^k_+): a >= 0, b >= 0, a_i b_i = 0.
void orthant_residuals(const Vec& a, const Vec& b, std::map<std::string, double>& out) {
  out["x_nonneg"] = std::max(0.0, -a.minCoeff());
  out["y_nonneg"] = std::max(0.0, -b.minCoeff());
  double comp = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    comp = std::max(comp, std::min(std::abs(a[i]), std::abs(b[i])));
  }
  out["complementarity"] = comp;
}

}  // namespace

std::string_view to_string(CompCaseKind c) {
  switch (c) {
    case CompCaseKind::I:
      return "I";
    case CompCaseKind::II:
      return "II";
    case CompCaseKind::III:
      return "III";
    case CompCaseKind::IV:
      return "IV";
    case CompCaseKind::None:
      break;
  }
  return "None";
}

bool in_L(const ConeDims& dims, const ConePoint& p, double tol) {
  check_dims(dims, p.x, p.u, "in_L");
  return p.x.minCoeff() >= p.u.norm() - tol;
}

bool in_M(const ConeDims& dims, const ConePoint& p, double tol) {
  check_dims(dims, p.x, p.u, "in_M");
  return p.x.sum() >= p.u.norm() - tol && p.x.minCoeff() >= -tol;
}

CompCase classify_complementarity(const ConeDims& dims, const Vec& x, const Vec& u, const Vec& y,
                                  const Vec& v, double tol) {
  check_dims(dims, x, u, "classify_complementarity");
  check_dims(dims, y, v, "classify_complementarity");

  const double nu = u.norm();
  const double nv = v.norm();
  const bool u_zero = nu <= tol;
  const bool v_zero = nv <= tol;

  CompCase out;
  CompCaseKind candidate;
  if (u_zero && v_zero) {
    candidate = CompCaseKind::I;
    out.residuals["u_norm"] = nu;
    out.residuals["v_norm"] = nv;
    orthant_residuals(x, y, out.residuals);
  } else if (u_zero) {
    candidate = CompCaseKind::II;
    out.residuals["u_norm"] = nu;
    out.residuals["dual_cone"] = std::max(0.0, nv - y.sum());
    orthant_residuals(x, y, out.residuals);
  } else if (v_zero) {
    candidate = CompCaseKind::III;
    out.residuals["v_norm"] = nv;
    out.residuals["primal_cone"] = std::max(0.0, nu - x.minCoeff());
    orthant_residuals(x, y, out.residuals);
  } else {
    candidate = CompCaseKind::IV;
    const double lambda = nv / nu;
    out.residuals["parallel"] = (v + lambda * u).norm();
    out.residuals["norm_balance"] = std::abs(y.sum() - nv);
    orthant_residuals((x.array() - nu).matrix(), y, out.residuals);
    out.lambda = lambda;
  }

  const bool ok = std::all_of(out.residuals.begin(), out.residuals.end(),
                              [tol](const auto& kv) { return kv.second <= tol; });
  out.kind = ok ? candidate : CompCaseKind::None;
  if (!ok) out.lambda.reset();
  return out;
}

}  // namespace slcp
