#include "slcp/saa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "slcp/error.hpp"
#include "slcp/merit.hpp"

namespace slcp {

namespace {

constexpr Eigen::Index kChunk = 2048;

void check_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput(fmt::format("{}: alpha must lie in (0, 1), got {}", what, alpha));
  }
}

double unit_open(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

// Runs body(chunk_index) for every chunk, on up to hardware_concurrency threads.
template <typename Body>
void for_each_chunk(Eigen::Index n_chunks, Body&& body) {
  const auto hw = static_cast<Eigen::Index>(std::max(1u, std::thread::hardware_concurrency()));
  const Eigen::Index workers = std::min(hw, n_chunks);
  if (workers <= 1) {
    for (Eigen::Index c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Eigen::Index w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Eigen::Index c = next++; c < n_chunks; c = next++) body(c);
    });
  }
}

}  // namespace

SampleSet draw_samples(const DistributionSpec& dist, int omega_dim, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput(fmt::format("draw_samples: N must be >= 1, got {}", n));
  if (omega_dim < 1) throw InvalidInput("draw_samples: omega_dim must be >= 1");
  SampleSet s;
  s.seed = seed;
  s.draws.resize(n, omega_dim);
  std::mt19937_64 gen(seed);
  double* out = s.draws.data();
  const Eigen::Index total = s.draws.size();
  for (Eigen::Index i = 0; i < total; i += 2) {
    const double u1 = unit_open(gen());
    const double u2 = unit_open(gen());
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i] = dist.mean + dist.std * radius * std::cos(angle);
    if (i + 1 < total) out[i + 1] = dist.mean + dist.std * radius * std::sin(angle);
  }
  return s;
}

SampleSet mean_sample(const ProblemSpec& spec) {
  SampleSet s;
  s.draws = RowMat::Constant(1, spec.omega_dim, spec.distribution.mean);
  return s;
}

std::uint64_t stage_seed(std::uint64_t seed, int j) {
  std::uint64_t z = seed + static_cast<std::uint64_t>(j) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScenarioBatch evaluate_scenarios(const ProblemSpec& spec, const SampleSet& s,
                                 const Eigen::Ref<const Vec>& z, bool with_derivatives) {
  const Eigen::Index n = s.draws.rows();
  const int dim = spec.dims.k + spec.dims.l + 1;
  if (n < 1) throw InvalidInput("evaluate_scenarios: empty sample set");
  if (s.draws.cols() != spec.omega_dim) {
    throw InvalidInput(fmt::format("evaluate_scenarios: samples have {} columns, expected {}",
                                   s.draws.cols(), spec.omega_dim));
  }
  if (z.size() != dim) {
    throw InvalidInput(fmt::format("evaluate_scenarios: point has length {}, expected {}", z.size(), dim));
  }

  ScenarioBatch out;
  out.losses.resize(n);
  if (with_derivatives) out.grads.resize(n, dim);

  const Eigen::Index n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Mat> jac_part(with_derivatives ? static_cast<std::size_t>(n_chunks) : 0);
  std::vector<Vec> res_part(with_derivatives ? static_cast<std::size_t>(n_chunks) : 0);

  for_each_chunk(n_chunks, [&](Eigen::Index c) {
    ScenarioEvaluator ev(spec);
    const Eigen::Index lo = c * kChunk;
    const Eigen::Index hi = std::min(n, lo + kChunk);
    Mat jac_sum;
    Vec res_sum;
    if (with_derivatives) {
      jac_sum = Mat::Zero(dim, dim);
      res_sum = Vec::Zero(dim);
    }
    for (Eigen::Index i = lo; i < hi; ++i) {
      ev.evaluate(s.draws.row(i).transpose(), z, with_derivatives);
      out.losses[i] = ev.theta();
      if (with_derivatives) {
        out.grads.row(i).noalias() = ev.residual().transpose() * ev.jacobian();
        jac_sum += ev.jacobian();
        res_sum += ev.residual();
      }
    }
    if (with_derivatives) {
      jac_part[static_cast<std::size_t>(c)] = std::move(jac_sum);
      res_part[static_cast<std::size_t>(c)] = std::move(res_sum);
    }
  });

  if (with_derivatives) {
    out.jacobian_mean = Mat::Zero(dim, dim);
    out.residual_mean = Vec::Zero(dim);
    for (Eigen::Index c = 0; c < n_chunks; ++c) {
      out.jacobian_mean += jac_part[static_cast<std::size_t>(c)];
      out.residual_mean += res_part[static_cast<std::size_t>(c)];
    }
    out.jacobian_mean /= static_cast<double>(n);
    out.residual_mean /= static_cast<double>(n);
  }
  return out;
}

Eigen::VectorXd scenario_losses(const ProblemSpec& spec, const SampleSet& s, const MixPoint& p) {
  check_point(spec.dims, p, "scenario_losses");
  return evaluate_scenarios(spec, s, p.pack(), false).losses;
}

double objective_from_losses(std::span<const double> losses, double alpha, double mu,
                             SmoothingKind kind, double theta) {
  check_alpha(alpha, "objective");
  if (losses.empty()) throw InvalidInput("objective: empty sample");
  double acc = 0.0;
  for (double v : losses) acc += smooth_plus(v - theta, mu, kind);
  return theta + acc / (alpha * static_cast<double>(losses.size()));
}

double objective(const ProblemSpec& spec, const SampleSet& s, double alpha, double mu,
                 SmoothingKind kind, const SAAPoint& q) {
  const Vec losses = scenario_losses(spec, s, q.p);
  return objective_from_losses({losses.data(), static_cast<std::size_t>(losses.size())}, alpha, mu,
                               kind, q.Theta);
}

Vec gradient(const ProblemSpec& spec, const SampleSet& s, double alpha, double mu,
             SmoothingKind kind, const SAAPoint& q) {
  check_alpha(alpha, "gradient");
  if (!(mu > 0.0)) throw InvalidInput(fmt::format("gradient: mu must be > 0, got {}", mu));
  check_point(spec.dims, q.p, "gradient");
  const ScenarioBatch b = evaluate_scenarios(spec, s, q.p.pack(), true);
  const int dim = spec.dims.k + spec.dims.l + 1;
  const double scale = 1.0 / (alpha * static_cast<double>(b.losses.size()));
  Vec g = Vec::Zero(dim + 1);
  double wsum = 0.0;
  for (Eigen::Index j = 0; j < b.losses.size(); ++j) {
    const double w = smooth_plus_deriv(b.losses[j] - q.Theta, mu, kind);
    g.head(dim) += w * b.grads.row(j).transpose();
    wsum += w;
  }
  g.head(dim) *= scale;
  g[dim] = 1.0 - scale * wsum;
  return g;
}

double theta_star(std::span<const double> losses, double alpha, double mu, SmoothingKind kind) {
  check_alpha(alpha, "theta_star");
  if (!(mu > 0.0)) throw InvalidInput(fmt::format("theta_star: mu must be > 0, got {}", mu));
  if (losses.empty()) throw InvalidInput("theta_star: empty sample");
  for (double v : losses) {
    if (!std::isfinite(v)) throw InvalidInput("theta_star: non-finite loss");
  }
  const double scale = 1.0 / (alpha * static_cast<double>(losses.size()));
  // derivative of the objective in Theta (strictly increasing) and its slope
  auto slope = [&](double theta, double* curv) {
    double acc = 0.0;
    double acc2 = 0.0;
    if (kind == SmoothingKind::Chks || kind == SmoothingKind::AutoScalingIP) {
      // inlined CHKS derivatives, one square root per loss
      const double c = 4.0 * mu * mu;
      for (double v : losses) {
        const double t = v - theta;
        const double r = std::sqrt(t * t + c);
        acc += t >= 0.0 ? 0.5 * (1.0 + t / r) : 0.5 * c / ((r - t) * r);
        acc2 += 0.5 * c / (r * r * r);
      }
    } else {
      for (double v : losses) {
        acc += smooth_plus_deriv(v - theta, mu, kind);
        acc2 += smooth_plus_deriv2(v - theta, mu, kind);
      }
    }
    if (curv) *curv = scale * acc2;
    return 1.0 - scale * acc;
  };
  // Start from the empirical quantile the root sits next to and widen a
  // small bracket around it until the slope changes sign.
  const auto n = losses.size();
  const auto tail = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n))));
  std::vector<double> work(losses.begin(), losses.end());
  const auto pos = work.begin() + static_cast<std::ptrdiff_t>(n - std::max<std::size_t>(tail, 1));
  std::nth_element(work.begin(), pos, work.end());
  const double x0 = *pos;
  const double width = 4.0 * mu + 1e-3 * (1.0 + std::abs(x0));
  double lo = x0 - width;
  double hi = x0 + width;
  for (double step = width; slope(lo, nullptr) > 0.0; step *= 2.0) lo -= step;
  for (double step = width; slope(hi, nullptr) < 0.0; step *= 2.0) hi += step;

  // Newton on the slope, safeguarded by the bracket: a step that leaves the
  // bracket or fails to halve the previous one is replaced by bisection.
  // Iterates until the slope vanishes or the bracket reaches adjacent doubles.
  double x = x0;
  double prev_step = hi - lo;
  for (int it = 0; it < 200; ++it) {
    double curv = 0.0;
    const double f = slope(x, &curv);
    if (f == 0.0) return x;
    (f > 0.0 ? hi : lo) = x;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double next = curv > 0.0 ? x - f / curv : mid;
    if (!(next > lo && next < hi) || std::abs(next - x) > 0.5 * prev_step) next = mid;
    prev_step = std::abs(next - x);
    if (next == x) break;
    x = next;
  }
  // at double resolution the slope may jump over zero; keep the closest end
  double best = x;
  double best_abs = std::abs(slope(x, nullptr));
  for (double c : {lo, hi}) {
    const double a = std::abs(slope(c, nullptr));
    if (a < best_abs) {
      best = c;
      best_abs = a;
    }
  }
  return best;
}

}  // namespace slcp
