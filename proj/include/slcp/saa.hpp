#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "slcp/problem.hpp"
#include "slcp/reformulate.hpp"
#include "slcp/risk.hpp"

namespace slcp {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N i.i.d. outcomes, one per row.
struct SampleSet {
  RowMat draws;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(draws.rows()); }
};

/// Spatial point plus the CVaR threshold.
struct SAAPoint {
  MixPoint p;
  double Theta = 0.0;
};

/// Standard normals come from std::mt19937_64 (whose output sequence is fixed
/// by the C++ standard): each 64-bit word w becomes U = ((w >> 11) + 0.5) / 2^53
/// in (0, 1), and consecutive pairs (U1, U2) go through Box-Muller,
/// Z1 = sqrt(-2 ln U1) cos(2 pi U2), Z2 = sqrt(-2 ln U1) sin(2 pi U2).
/// Draws fill the matrix row by row and are scaled to mean + std * Z.
SampleSet draw_samples(const DistributionSpec& dist, int omega_dim, int n, std::uint64_t seed);

/// A single row holding the distribution mean (the expected-value scenario).
SampleSet mean_sample(const ProblemSpec& spec);

/// Seed for outer stage j (1-based): SplitMix64 finalizer applied to
/// seed + j * 0x9E3779B97F4A7C15.
std::uint64_t stage_seed(std::uint64_t seed, int j);

/// Per-scenario merit values theta_FB(p, w_j).
Eigen::VectorXd scenario_losses(const ProblemSpec& spec, const SampleSet& s, const MixPoint& p);

/// Theta + alpha^-1 mean_j smooth_plus(loss_j - Theta, mu).
double objective_from_losses(std::span<const double> losses, double alpha, double mu,
                             SmoothingKind kind, double theta);

/// Sample-average smoothed CVaR objective. mu = 0 gives the unsmoothed form.
double objective(const ProblemSpec& spec, const SampleSet& s, double alpha, double mu,
                 SmoothingKind kind, const SAAPoint& q);

/// Gradient w.r.t. (x_m, u, t, Theta), length k + l + 2. Requires mu > 0.
Vec gradient(const ProblemSpec& spec, const SampleSet& s, double alpha, double mu,
             SmoothingKind kind, const SAAPoint& q);

/// Minimizer over Theta of the smoothed objective for fixed losses, i.e. the
/// root of 1 - alpha^-1 mean_j smooth_plus_deriv(loss_j - Theta, mu), found by
/// bracketed Newton iteration with bisection fallback, run to full precision.
double theta_star(std::span<const double> losses, double alpha, double mu,
                  SmoothingKind kind = SmoothingKind::Chks);

/// Everything the solver needs from one sweep over the scenarios.
struct ScenarioBatch {
  Vec losses;       ///< theta_FB per scenario
  RowMat grads;     ///< row j = A_j' F_j (only when requested)
  Mat jacobian_mean;  ///< (1/N) sum A_j (only when requested)
  Vec residual_mean;  ///< (1/N) sum F_j (only when requested)
};

/// Evaluates every scenario at packed point z. Work is split into fixed-size
/// chunks; per-chunk partial sums are combined in chunk order, so results do
/// not depend on the number of worker threads.
ScenarioBatch evaluate_scenarios(const ProblemSpec& spec, const SampleSet& s,
                                 const Eigen::Ref<const Vec>& z, bool with_derivatives);

}  // namespace slcp
