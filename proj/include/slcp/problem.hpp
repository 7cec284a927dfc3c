#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "slcp/cone.hpp"

namespace slcp {

/// One affine perturbation term: entry (row, col) of T, or entry `row` of r
/// when `col` is absent, gains coeff * omega[omega_index].
struct PerturbEntry {
  int row = 0;
  std::optional<int> col;
  double coeff = 0.0;
  int omega_index = 0;

  bool operator==(const PerturbEntry&) const = default;
};

enum class DistributionKind { IidNormal };

struct DistributionSpec {
  DistributionKind kind = DistributionKind::IidNormal;
  double mean = 0.0;
  double std = 1.0;

  bool operator==(const DistributionSpec&) const = default;
};

/// Data of a stochastic LCP on L(k,l): T(w) = T_base + sum of T_perturb terms,
/// r(w) = r_base + sum of r_perturb terms. With m = k + l, T is split as
/// [[A, B], [C, D]] (A is k x k) and r as (p, q).
struct ProblemSpec {
  ConeDims dims;
  int omega_dim = 1;
  Mat T_base;
  Vec r_base;
  std::vector<PerturbEntry> T_perturb;
  std::vector<PerturbEntry> r_perturb;
  DistributionSpec distribution;

  bool operator==(const ProblemSpec& o) const;
};

/// T(w), r(w) for one outcome w.
struct Realization {
  Mat T;
  Vec r;

  auto A(const ConeDims& d) const { return T.topLeftCorner(d.k, d.k); }
  auto B(const ConeDims& d) const { return T.topRightCorner(d.k, d.l); }
  auto C(const ConeDims& d) const { return T.bottomLeftCorner(d.l, d.k); }
  auto D(const ConeDims& d) const { return T.bottomRightCorner(d.l, d.l); }
  auto p(const ConeDims& d) const { return r.head(d.k); }
  auto q(const ConeDims& d) const { return r.tail(d.l); }
};

/// Throws ValidationError naming the first broken invariant.
void validate(const ProblemSpec& spec);

/// Parses and validates a problem file (JSON object, see README).
/// Throws ParseError for malformed text and ValidationError for bad contents.
ProblemSpec load_problem(std::string_view text);

/// Writes the problem file format; load_problem(serialize_problem(s)) == s.
std::string serialize_problem(const ProblemSpec& spec);

Realization realize(const ProblemSpec& spec, const Vec& omega);

/// Allocation-free variant used on hot paths; `out` is resized on demand.
void realize_into(const ProblemSpec& spec, const Eigen::Ref<const Vec>& omega, Realization& out);

/// F(x, u, w) = T(w) (x; u) + r(w).
Vec f_eval(const ProblemSpec& spec, const Vec& omega, const Vec& x, const Vec& u);

/// The L(3,2) instance with three i.i.d. N(0,1) perturbations.
ProblemSpec builtin_example();

/// Vector of length omega_dim filled with the distribution mean.
Vec mean_omega(const ProblemSpec& spec);

}  // namespace slcp
