#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace slcp {

/// Smooth approximations p(t, mu) of max(0, t); all reduce to max(0, t) at mu = 0.
enum class SmoothingKind {
  NeuralNetwork,   ///< t + mu log(1 + exp(-t/mu))
  InteriorPoint,   ///< (t + sqrt(t^2 + 4 mu)) / 2
  AutoScalingIP,   ///< (t + sqrt(t^2 + 4 mu^2)) / 2 + mu
  Chks,            ///< (t + sqrt(t^2 + 4 mu^2)) / 2
};

std::string_view to_string(SmoothingKind kind);
/// Accepts the short CLI names "nn", "ip", "asip", "chks".
std::optional<SmoothingKind> parse_smoothing(std::string_view name);

double plus_part(double t);

/// Requires mu >= 0.
double smooth_plus(double t, double mu, SmoothingKind kind = SmoothingKind::Chks);

/// d/dt smooth_plus; requires mu > 0. Lies in (0, 1) up to rounding.
double smooth_plus_deriv(double t, double mu, SmoothingKind kind = SmoothingKind::Chks);

/// d^2/dt^2 smooth_plus; requires mu > 0.
double smooth_plus_deriv2(double t, double mu, SmoothingKind kind = SmoothingKind::Chks);

/// Empirical VaR: the smallest sample value v with #{losses > v} < alpha N.
/// This is the upper end of the set of minimizers of the Rockafellar-Uryasev
/// objective, so cvar_empirical >= var_empirical holds for every alpha N. For
/// integer alpha N and distinct losses it is also the smallest sample value
/// with #{losses >= v} <= alpha N.
double var_empirical(std::span<const double> losses, double alpha);

/// Empirical CVaR in Rockafellar-Uryasev form, min over Theta of
/// Theta + (alpha N)^-1 sum [loss - Theta]_+, evaluated at its minimizer
/// var_empirical (exact for fractional alpha N as well).
double cvar_empirical(std::span<const double> losses, double alpha);

/// Theta + alpha^-1 smooth_plus(loss - Theta, mu).
double ru_pointwise(double loss, double theta, double alpha, double mu,
                    SmoothingKind kind = SmoothingKind::Chks);

}  // namespace slcp
