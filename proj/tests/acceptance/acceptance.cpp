// One PASS/FAIL line per criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <fmt/format.h>

#include "slcp/cone.hpp"
#include "slcp/merit.hpp"
#include "slcp/reformulate.hpp"
#include "slcp/risk.hpp"
#include "slcp/saa.hpp"
#include "slcp/solver.hpp"
#include "support/fixtures.hpp"

using namespace slcp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::span<const double> sp(const std::vector<double>& v) { return v; }
std::span<const double> sp(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

bool within(const Vec& got, const std::vector<double>& want, double band) {
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    if (!(std::abs(got[i] - want[static_cast<std::size_t>(i)]) <= band)) return false;
  }
  return true;
}

std::string show(const Vec& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += fmt::format("{}{:.4f}", i ? ", " : "", v[i]);
  return s + ")";
}

Outcome builtin_reproduction() {
  const std::vector<double> xu_ref{1.546, 0.261, 1.059, 0.124, -0.254};
  const std::vector<double> F_ref{1.200, 28.566, -0.177, -12.617, 25.514};
  const ProblemSpec spec = builtin_example();
  std::string detail;
  for (std::uint64_t seed : {7, 42, 1234}) {
    SolverConfig cfg;
    cfg.alpha = 0.05;
    cfg.schedule = {10, 100, 1000, 10000, 100000};
    cfg.seed = seed;
    const SolveReport rep = solve(spec, cfg);
    Vec xu(5);
    xu << rep.recovered.x, rep.recovered.u;
    const bool ok_xu = within(xu, xu_ref, 0.05);
    const bool ok_F = within(rep.F_at_mean, F_ref, 0.3);
    const bool ok_aloc = rep.aloc >= 0.9 && rep.aloc <= 1.3;
    const bool ok_theta = rep.theta_threshold >= 0.07 && rep.theta_threshold <= 0.11;
    detail += fmt::format("[seed {}: (x,u)={} {}, F={} {}, aloc={:.4f} {}, Theta={:.4f} {}, last stop {}] ", seed,
                          show(xu), ok_xu ? "ok" : "off", show(rep.F_at_mean), ok_F ? "ok" : "off", rep.aloc,
                          ok_aloc ? "ok" : "off", rep.theta_threshold, ok_theta ? "ok" : "off",
                          to_string(rep.stages.back().termination));
    if (ok_xu && ok_F && ok_aloc && ok_theta) return {true, detail};
  }
  return {false, detail};
}

Outcome case_iv_solve() {
  SolverConfig cfg;
  cfg.mode = SolveMode::Ev;
  cfg.schedule = {1, 2};
  cfg.tol_r = 1e-12;
  double worst_merit = 0.0;
  double worst_time = 0.0;
  int bad_case = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = testing::make_case_iv(seed);
    std::mt19937_64 rng(seed + 100);
    Vec z0 = init_from_lcp(c.x, c.u).pack();
    z0 += 0.099 * testing::normal_vec(rng, static_cast<int>(z0.size())).normalized();
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport rep = solve(c.spec, cfg, SAAPoint{MixPoint::unpack(c.spec.dims, z0), 0.0});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double merit = merit_theta(c.spec, Vec::Zero(1), rep.final_mix.p);
    const Vec F = f_eval(c.spec, Vec::Zero(1), rep.recovered.x, rep.recovered.u);
    const auto kind =
        classify_complementarity(c.spec.dims, rep.recovered.x, rep.recovered.u, F.head(3), F.tail(2), 1e-6).kind;
    if (kind != CompCaseKind::IV) ++bad_case;
    worst_merit = std::max(worst_merit, merit);
    worst_time = std::max(worst_time, secs);
  }
  return {worst_merit <= 1e-10 && bad_case == 0 && worst_time < 1.0,
          fmt::format("10 instances, worst merit {:.3g}, not case IV: {}, slowest solve {:.3f} s", worst_merit,
                      bad_case, worst_time)};
}

MixPoint random_point(std::mt19937_64& rng, const ConeDims& d) {
  return {testing::normal_vec(rng, d.k), testing::normal_vec(rng, d.l),
          std::uniform_real_distribution<double>(0.1, 1.5)(rng)};
}

// distance of the point to the FB kink set over all samples
double kink_distance(const ProblemSpec& spec, const SampleSet& s, const MixPoint& p) {
  double dist = INFINITY;
  for (int j = 0; j < s.size(); ++j) {
    const Vec f1 = f1_eval(spec, s.draws.row(j).transpose(), p);
    for (int i = 0; i < spec.dims.k; ++i) dist = std::min(dist, std::hypot(p.x_m[i], f1[i]));
  }
  return dist;
}

Outcome gradient_exactness() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> kd(1, 4), ld(1, 3), nd(1, 20);
  double worst_grad = 0.0;
  double worst_blocks = 0.0;
  int n = 0;
  while (n < 200) {
    const int k = kd(rng), l = ld(rng);
    const ProblemSpec spec = testing::random_spec(rng, k, l, 2);
    const SampleSet s = draw_samples(spec.distribution, 2, nd(rng), rng());
    const MixPoint p = random_point(rng, spec.dims);
    // central differences need the FB terms to be smooth within the step
    if (kink_distance(spec, s, p) < 1e-3) continue;
    const double mu = n % 2 ? 1e-2 : 1e-4;
    const Vec L = scenario_losses(spec, s, p);
    const double Theta = L.minCoeff() - 1.0 + (L.maxCoeff() - L.minCoeff() + 2.0) *
                                                  std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    ++n;

    const int dim = k + l + 1;
    const Vec g = gradient(spec, s, 0.05, mu, SmoothingKind::Chks, {p, Theta});
    auto f = [&](const Vec& z) {
      return objective(spec, s, 0.05, mu, SmoothingKind::Chks, {MixPoint::unpack(spec.dims, z.head(dim)), z[dim]});
    };
    Vec z(dim + 1);
    z << p.pack(), Theta;
    worst_grad = std::max(worst_grad, testing::rel_err(g, testing::fd_gradient(f, z)));

    const Vec w = s.draws.row(0).transpose();
    const JacobianBlocks b = jacobian_blocks(spec, w, p);
    auto f1 = [&](const Vec& zz) { return f1_eval(spec, w, MixPoint::unpack(spec.dims, zz)); };
    auto f2 = [&](const Vec& zz) { return f2_eval(spec, w, MixPoint::unpack(spec.dims, zz)); };
    const Mat J1 = testing::fd_jacobian(f1, p.pack());
    const Mat J2 = testing::fd_jacobian(f2, p.pack());
    worst_blocks = std::max({worst_blocks, testing::rel_err(b.A_tilde, Mat(J1.leftCols(k))),
                             testing::rel_err(b.B_tilde, Mat(J1.rightCols(l + 1))),
                             testing::rel_err(b.C_tilde, Mat(J2.leftCols(k))),
                             testing::rel_err(b.D_tilde, Mat(J2.rightCols(l + 1)))});
  }
  return {worst_grad <= 1e-5 && worst_blocks <= 1e-5,
          fmt::format("200 triples, worst gradient rel err {:.3g}, worst block rel err {:.3g}", worst_grad,
                      worst_blocks)};
}

Outcome coherence() {
  std::mt19937_64 rng(8128);
  std::uniform_int_distribution<int> size(1, 300);
  std::uniform_real_distribution<double> alpha_d(0.01, 0.99), lam_d(0.01, 100.0), shift(0.0, 2.0);
  int homog = 0, mono = 0, subadd = 0, order = 0;
  double worst_slack = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const int n = size(rng);
    const double alpha = i % 4 == 0 ? 0.05 : alpha_d(rng);
    const double scale = std::exp(std::normal_distribution<double>(0.0, 1.0)(rng));
    std::vector<double> a = [&] {
      const Vec v = testing::normal_vec(rng, n, scale);
      return std::vector<double>(v.begin(), v.end());
    }();
    std::vector<double> b = [&] {
      const Vec v = testing::normal_vec(rng, n, scale);
      return std::vector<double>(v.begin(), v.end());
    }();
    const double ca = cvar_empirical(sp(a), alpha);
    const double cb = cvar_empirical(sp(b), alpha);
    const double va = var_empirical(sp(a), alpha);

    // powers of two scale exactly, so the check is free of rounding
    const double lam = i % 2 ? std::ldexp(1.0, static_cast<int>(lam_d(rng)) % 20 - 10) : lam_d(rng);
    std::vector<double> la(a);
    for (auto& x : la) x *= lam;
    const double tol_h = 1e-12 * std::max(1.0, std::abs(lam * ca));
    if (!(std::abs(cvar_empirical(sp(la), alpha) - lam * ca) <= tol_h)) ++homog;
    if (!(std::abs(var_empirical(sp(la), alpha) - lam * va) <= tol_h)) ++homog;

    std::vector<double> up(a);
    for (auto& x : up) x += shift(rng);
    if (!(cvar_empirical(sp(up), alpha) >= ca - 1e-12 * std::max(1.0, std::abs(ca)))) ++mono;
    if (!(var_empirical(sp(up), alpha) >= va - 1e-12 * std::max(1.0, std::abs(va)))) ++mono;

    std::vector<double> sum(a);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += b[j];
    const double slack = ca + cb - cvar_empirical(sp(sum), alpha);
    worst_slack = std::min(worst_slack, slack);
    if (!(slack >= -1e-10)) ++subadd;
    if (!(ca >= va)) ++order;
  }

  const auto [a, b] = testing::jump_pair(2024);
  std::vector<double> sum(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) sum[j] = a[j] + b[j];
  const double va = var_empirical(sp(a), 0.01), vb = var_empirical(sp(b), 0.01), vs = var_empirical(sp(sum), 0.01);
  const bool witness = vs > va + vb;

  return {homog == 0 && mono == 0 && subadd == 0 && order == 0 && witness,
          fmt::format("1000 samples: homogeneity misses {}, monotonicity misses {}, sub-additivity misses {} "
                      "(worst slack {:.3g}), CVaR < VaR {}; jump witness VaR {:.4f} vs {:.4f} + {:.4f}",
                      homog, mono, subadd, worst_slack, order, vs, va, vb)};
}

Outcome ru_equivalence() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> size(1, 500);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = size(rng);
    Vec L = testing::normal_vec(rng, n, 3.0);
    if (i % 3 == 0) L = L.array().exp();
    for (double alpha : {0.05, 0.2, 0.5}) {
      const double mu = 1e-8;
      const double th = theta_star(sp(L), alpha, mu);
      const double smoothed = objective_from_losses(sp(L), alpha, mu, SmoothingKind::Chks, th);
      worst = std::max(worst, std::abs(smoothed - cvar_empirical(sp(L), alpha)));
    }
  }
  return {worst <= 1e-4, fmt::format("300 (sample, alpha) pairs, worst |smoothed min - CVaR| {:.3g}", worst)};
}

Outcome chks_envelope() {
  int misses = 0;
  double worst_zero = 0.0;
  for (double mu : {1.0, 1e-2, 1e-6}) {
    for (int i = -200000; i <= 200000; ++i) {
      const double t = i * 5e-5;
      const double gap = smooth_plus(t, mu) - plus_part(t);
      if (!(gap >= 0.0 && gap <= mu)) ++misses;
    }
    worst_zero = std::max(worst_zero, std::abs(smooth_plus(0.0, mu) - mu));
  }
  int reduce = 0;
  for (SmoothingKind kind : {SmoothingKind::Chks, SmoothingKind::NeuralNetwork, SmoothingKind::InteriorPoint,
                             SmoothingKind::AutoScalingIP}) {
    for (int i = -1000; i <= 1000; ++i) {
      const double t = i * 0.01;
      if (smooth_plus(t, 0.0, kind) != plus_part(t)) ++reduce;
    }
  }
  return {misses == 0 && worst_zero == 0.0 && reduce == 0,
          fmt::format("grid of 400001 points per mu: out of [0, mu] {}, |p(0) - mu| max {:.3g}; "
                      "mu = 0 mismatches over four smoothers {}",
                      misses, worst_zero, reduce)};
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  status = pclose(pipe);
  return out;
}

Outcome cli_determinism() {
  const std::string cmd = fmt::format(
      "'{}' solve --builtin --seed 1234 --schedule 10,100,1000 --format csv --no-timing 2>/dev/null", SLCP_CLI_PATH);
  int s1 = 0, s2 = 0;
  const std::string a = capture(cmd, s1);
  const std::string b = capture(cmd, s2);
  const bool ran = !a.empty() && WIFEXITED(s1) && WIFEXITED(s2) && WEXITSTATUS(s1) != 1;
  return {ran && a == b, fmt::format("{} bytes vs {} bytes, exit codes {} and {}, identical: {}", a.size(), b.size(),
                                     WEXITSTATUS(s1), WEXITSTATUS(s2), a == b)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"builtin example reproduction", builtin_reproduction},
      {"case-IV oracle solve", case_iv_solve},
      {"gradient and Jacobian exactness", gradient_exactness},
      {"risk measure coherence", coherence},
      {"smoothed RU minimum equals CVaR", ru_equivalence},
      {"CHKS envelope", chks_envelope},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
