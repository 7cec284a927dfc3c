#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace slcp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kDefaultConeTol = 1e-8;

/// Block sizes of the extended second order cone pair L(k,l), M(k,l).
struct ConeDims {
  int k = 1;  ///< length of the x-part
  int l = 1;  ///< length of the u-part

  int m() const { return k + l; }
  bool operator==(const ConeDims&) const = default;
};

/// A point (x, u) in R^k x R^l.
struct ConePoint {
  Vec x;
  Vec u;
};

enum class CompCaseKind { I, II, III, IV, None };

std::string_view to_string(CompCaseKind c);

/// Result of classifying a pair ((x,u),(y,v)) against the four
/// characterizations of the complementarity set of L.
struct CompCase {
  CompCaseKind kind = CompCaseKind::None;
  std::optional<double> lambda;  ///< only for case IV: |v| / |u|
  std::map<std::string, double> residuals;
};

/// x >= |u| e componentwise, with slack `tol`.
bool in_L(const ConeDims& dims, const ConePoint& p, double tol = kDefaultConeTol);

/// e'x >= |u| and x >= 0, with slack `tol`.
bool in_M(const ConeDims& dims, const ConePoint& p, double tol = kDefaultConeTol);

/// Tests cases I, II, III, IV in that order and returns the first match.
/// |u| <= tol (resp. |v| <= tol) counts as u = 0 (resp. v = 0), so exactly
/// one case is admissible for a given tuple; when its conditions fail the
/// result is None and `residuals` still reports that case's violations.
CompCase classify_complementarity(const ConeDims& dims, const Vec& x, const Vec& u, const Vec& y,
                                  const Vec& v, double tol = kDefaultConeTol);

}  // namespace slcp
