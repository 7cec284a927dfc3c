#include "slcp/risk.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "slcp/error.hpp"

namespace slcp {

namespace {

// (t + sqrt(t^2 + c)) / 2 without cancellation for t << 0.
double half_sqrt_sum(double t, double c) {
  const double s = std::sqrt(t * t + c);
  return t >= 0.0 ? 0.5 * (t + s) : 0.5 * c / (s - t);
}

// 0.5 (1 + t / sqrt(t^2 + c)), same treatment.
double half_sqrt_sum_deriv(double t, double c) {
  const double s = std::sqrt(t * t + c);
  return t >= 0.0 ? 0.5 * (1.0 + t / s) : 0.5 * c / ((s - t) * s);
}

// d/dt of half_sqrt_sum_deriv: c / (2 s^3).
double half_sqrt_sum_deriv2(double t, double c) {
  const double s = std::sqrt(t * t + c);
  return 0.5 * c / (s * s * s);
}

void check_sample(std::span<const double> losses, double alpha, const char* what) {
  if (losses.empty()) throw InvalidInput(fmt::format("{}: empty sample", what));
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput(fmt::format("{}: alpha must lie in (0, 1), got {}", what, alpha));
  }
  for (double v : losses) {
    if (!std::isfinite(v)) throw InvalidInput(fmt::format("{}: non-finite loss", what));
  }
}

}  // namespace

std::string_view to_string(SmoothingKind kind) {
  switch (kind) {
    case SmoothingKind::NeuralNetwork:
      return "nn";
    case SmoothingKind::InteriorPoint:
      return "ip";
    case SmoothingKind::AutoScalingIP:
      return "asip";
    case SmoothingKind::Chks:
      break;
  }
  return "chks";
}

std::optional<SmoothingKind> parse_smoothing(std::string_view name) {
  if (name == "chks") return SmoothingKind::Chks;
  if (name == "nn") return SmoothingKind::NeuralNetwork;
  if (name == "ip") return SmoothingKind::InteriorPoint;
  if (name == "asip") return SmoothingKind::AutoScalingIP;
  return std::nullopt;
}

double plus_part(double t) { return std::max(0.0, t); }

double smooth_plus(double t, double mu, SmoothingKind kind) {
  if (mu < 0.0) throw InvalidInput(fmt::format("smooth_plus: mu must be >= 0, got {}", mu));
  if (mu == 0.0) return plus_part(t);
  switch (kind) {
    case SmoothingKind::NeuralNetwork:
      // mu * softplus(t / mu)
      return plus_part(t) + mu * std::log1p(std::exp(-std::abs(t) / mu));
    case SmoothingKind::InteriorPoint:
      return half_sqrt_sum(t, 4.0 * mu);
    case SmoothingKind::AutoScalingIP:
      return half_sqrt_sum(t, 4.0 * mu * mu) + mu;
    case SmoothingKind::Chks:
      break;
  }
  return half_sqrt_sum(t, 4.0 * mu * mu);
}

double smooth_plus_deriv(double t, double mu, SmoothingKind kind) {
  if (!(mu > 0.0)) throw InvalidInput(fmt::format("smooth_plus_deriv: mu must be > 0, got {}", mu));
  switch (kind) {
    case SmoothingKind::NeuralNetwork: {
      const double e = std::exp(-std::abs(t) / mu);
      return t >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    }
    case SmoothingKind::InteriorPoint:
      return half_sqrt_sum_deriv(t, 4.0 * mu);
    case SmoothingKind::AutoScalingIP:
    case SmoothingKind::Chks:
      break;
  }
  return half_sqrt_sum_deriv(t, 4.0 * mu * mu);
}

double smooth_plus_deriv2(double t, double mu, SmoothingKind kind) {
  if (!(mu > 0.0)) throw InvalidInput(fmt::format("smooth_plus_deriv2: mu must be > 0, got {}", mu));
  switch (kind) {
    case SmoothingKind::NeuralNetwork: {
      const double e = std::exp(-std::abs(t) / mu);
      return e / ((1.0 + e) * (1.0 + e) * mu);
    }
    case SmoothingKind::InteriorPoint:
      return half_sqrt_sum_deriv2(t, 4.0 * mu);
    case SmoothingKind::AutoScalingIP:
    case SmoothingKind::Chks:
      break;
  }
  return half_sqrt_sum_deriv2(t, 4.0 * mu * mu);
}

double var_empirical(std::span<const double> losses, double alpha) {
  check_sample(losses, alpha, "var_empirical");
  const auto n = losses.size();
  // at most ceil(alpha N) - 1 losses may lie strictly above; the relative slack
  // keeps alpha N = 2.0000000000000004 from counting as non-integer
  const double budget = alpha * static_cast<double>(n) * (1.0 - 1e-12);
  const auto above = std::min<std::size_t>(static_cast<std::size_t>(std::ceil(budget)) - 1, n - 1);
  std::vector<double> sorted(losses.begin(), losses.end());
  const auto pos = sorted.begin() + static_cast<std::ptrdiff_t>(n - 1 - above);
  std::nth_element(sorted.begin(), pos, sorted.end());
  return *pos;
}

double cvar_empirical(std::span<const double> losses, double alpha) {
  const double q = var_empirical(losses, alpha);
  double excess = 0.0;
  for (double v : losses) excess += plus_part(v - q);
  return q + excess / (alpha * static_cast<double>(losses.size()));
}

double ru_pointwise(double loss, double theta, double alpha, double mu, SmoothingKind kind) {
  return theta + smooth_plus(loss - theta, mu, kind) / alpha;
}

}  // namespace slcp
