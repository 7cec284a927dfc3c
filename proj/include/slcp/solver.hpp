#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "slcp/cone.hpp"
#include "slcp/problem.hpp"
#include "slcp/risk.hpp"
#include "slcp/saa.hpp"

namespace slcp {

enum class SolveMode { Cvar, Ev, Erm };

std::string_view to_string(SolveMode mode);
std::optional<SolveMode> parse_mode(std::string_view name);

struct SolverConfig {
  double alpha = 0.05;
  double mu = 1e-4;
  double lm_nu = 1e-6;
  std::vector<int> schedule{10, 100, 1000, 10000};
  std::uint64_t seed = 42;
  double tol_r = 1e-6;
  double eps = 1e-6;
  double c1 = 1e-4;
  double c2 = 0.9;
  int k_max = 500;
  SolveMode mode = SolveMode::Cvar;
  SmoothingKind smoothing = SmoothingKind::Chks;
  double descent_r = 1e-8;
};

/// Throws InvalidInput naming the offending field.
void validate(const SolverConfig& cfg);

/// Why a stage ended. `stalled` means the line search found no step with
/// sufficient decrease along either the LM or the steepest descent direction.
enum class Termination { GradTol, KMax, OuterEps, Stalled };

std::string_view to_string(Termination t);

struct StageResult {
  int j = 0;
  int N = 0;
  SAAPoint point;
  double objective = 0.0;
  double grad_inf_norm = 0.0;
  int inner_iters = 0;
  Termination termination = Termination::GradTol;
  double wall_time = 0.0;  ///< seconds spent in the inner loop
  ConePoint recovered;
  Vec F_at_mean;
  double aloc = 0.0;
  std::vector<double> objective_history;  ///< stage objective at each inner iterate
};

struct SolveReport {
  std::vector<StageResult> stages;
  SAAPoint final_mix;
  ConePoint recovered;
  Vec F_at_mean;
  double aloc = 0.0;
  double theta_threshold = 0.0;
  SolveMode mode = SolveMode::Cvar;
};

/// Solves (A'A + nu I) d = -A'F with a Cholesky factorization.
/// Throws NumericError when the system is not numerically SPD or d is not finite.
Vec lm_step(const Mat& A_bar, const Vec& F_bar, double lm_nu);

/// LM direction for the sample-mean Jacobian and residual at q.p.
Vec lm_direction(const ProblemSpec& spec, const SampleSet& s, const SAAPoint& q, double lm_nu);

/// (1/N) sum_i |<(x, u), F(x, u, w_i)>|.
double aloc(const ProblemSpec& spec, const SampleSet& s, const Vec& x, const Vec& u);

/// x_m = 0, u = 0.1 e / sqrt(l), t = |u|; Theta is filled in by solve.
MixPoint default_start(const ConeDims& dims);

SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg,
                  const std::optional<SAAPoint>& start = std::nullopt);

}  // namespace slcp
