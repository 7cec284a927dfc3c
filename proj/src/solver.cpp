#include "slcp/solver.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "slcp/error.hpp"
#include "slcp/line_search.hpp"
#include "slcp/merit.hpp"
#include "slcp/reformulate.hpp"

namespace slcp {

namespace {

std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Value and (optionally) gradient of the stage objective at a packed point.
// In cvar mode Theta is minimized out, so `value` is min over Theta and the
// spatial gradient is that of the marginal function.
struct Eval {
  Vec losses;
  double Theta = std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  Vec grad;  // length dim + 1, last entry is the Theta component
  Mat A_bar;
  Vec F_bar;
};

class StageObjective {
 public:
  StageObjective(const ProblemSpec& spec, const SolverConfig& cfg, const SampleSet& s)
      : spec_(spec), cfg_(cfg), s_(s), dim_(spec.dims.k + spec.dims.l + 1) {}

  int dim() const { return dim_; }

  Eval operator()(const Vec& z, bool with_derivatives) const {
    ScenarioBatch b = evaluate_scenarios(spec_, s_, z, with_derivatives);
    Eval e;
    const auto n = static_cast<double>(b.losses.size());
    const bool cvar = cfg_.mode == SolveMode::Cvar;
    if (cvar) {
      for (double v : b.losses) {
        if (!std::isfinite(v)) {
          e.value = std::numeric_limits<double>::infinity();
          e.losses = std::move(b.losses);
          return e;
        }
      }
      e.Theta = theta_star(as_span(b.losses), cfg_.alpha, cfg_.mu, cfg_.smoothing);
      e.value = objective_from_losses(as_span(b.losses), cfg_.alpha, cfg_.mu, cfg_.smoothing, e.Theta);
    } else {
      e.value = b.losses.mean();
    }
    if (with_derivatives && std::isfinite(e.value)) {
      e.grad = Vec::Zero(dim_ + 1);
      if (cvar) {
        Vec w(b.losses.size());
        const double scale = 1.0 / (cfg_.alpha * n);
        for (Eigen::Index j = 0; j < w.size(); ++j) {
          w[j] = scale * smooth_plus_deriv(b.losses[j] - e.Theta, cfg_.mu, cfg_.smoothing);
        }
        e.grad.head(dim_).noalias() = b.grads.transpose() * w;
        e.grad[dim_] = 1.0 - w.sum();
      } else {
        e.grad.head(dim_) = b.grads.colwise().sum().transpose() / n;
      }
      e.A_bar = std::move(b.jacobian_mean);
      e.F_bar = std::move(b.residual_mean);
    }
    e.losses = std::move(b.losses);
    return e;
  }

 private:
  const ProblemSpec& spec_;
  const SolverConfig& cfg_;
  const SampleSet& s_;
  int dim_;
};

struct InnerResult {
  Vec z;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iters = 0;
  Termination termination = Termination::GradTol;
  std::vector<double> history;
};

InnerResult run_inner(const StageObjective& obj, const SolverConfig& cfg, Vec z) {
  const int dim = obj.dim();
  Eval cur = obj(z, true);
  if (!std::isfinite(cur.value)) throw InvalidInput("solve: objective is not finite at the start point");

  InnerResult out;
  double last_steep = 0.0;
  for (int k = 0;; ++k) {
    out.iters = k;
    out.history.push_back(cur.value);
    out.grad_inf_norm = cur.grad.cwiseAbs().maxCoeff();
    if (out.grad_inf_norm <= cfg.tol_r) {
      out.termination = Termination::GradTol;
      break;
    }
    if (k == cfg.k_max) {
      out.termination = Termination::KMax;
      break;
    }
    const Vec g = cur.grad.head(dim);
    Vec d;
    bool steepest = false;
    try {
      d = lm_step(cur.A_bar, cur.F_bar, cfg.lm_nu);
    } catch (const NumericError&) {
      steepest = true;
    }
    if (!steepest && (d.norm() == 0.0 || g.dot(d) > -cfg.descent_r * d.norm())) steepest = true;
    if (steepest) d = -g;

    std::optional<std::pair<double, Eval>> cached;
    WolfeResult ls;
    for (;;) {
      auto f = [&](double s) { return obj(z + s * d, false).value; };
      auto gs = [&](double s) {
        Eval e = obj(z + s * d, true);
        const double slope = std::isfinite(e.value) ? e.grad.head(dim).dot(d)
                                                    : std::numeric_limits<double>::quiet_NaN();
        cached.emplace(s, std::move(e));
        return slope;
      };
      // a unit step along the raw gradient is usually far too long; reuse the
      // scale of the last accepted gradient step instead
      double s0 = 1.0;
      if (steepest) s0 = last_steep > 0.0 ? 2.0 * last_steep : std::min(1.0, 1.0 / d.norm());
      ls = wolfe_search(f, gs, cur.value, g.dot(d), cfg.c1, cfg.c2, s0);
      if (ls.decrease || steepest) break;
      steepest = true;
      d = -g;
      cached.reset();
    }
    if (!ls.decrease) {
      out.termination = Termination::Stalled;
      break;
    }
    if (steepest) last_steep = ls.step;
    z += ls.step * d;
    if (cached && cached->first == ls.step) {
      cur = std::move(cached->second);
    } else {
      cur = obj(z, true);
    }
  }
  out.z = std::move(z);
  out.value = cur.value;
  return out;
}

}  // namespace

std::string_view to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::Ev:
      return "ev";
    case SolveMode::Erm:
      return "erm";
    case SolveMode::Cvar:
      break;
  }
  return "cvar";
}

std::optional<SolveMode> parse_mode(std::string_view name) {
  if (name == "cvar") return SolveMode::Cvar;
  if (name == "ev") return SolveMode::Ev;
  if (name == "erm") return SolveMode::Erm;
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::KMax:
      return "k_max";
    case Termination::OuterEps:
      return "outer_eps";
    case Termination::Stalled:
      return "stalled";
    case Termination::GradTol:
      break;
  }
  return "grad_tol";
}

void validate(const SolverConfig& cfg) {
  auto fail = [](std::string_view field, const std::string& why) {
    throw InvalidInput(fmt::format("config: {} {}", field, why));
  };
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail("alpha", "must lie in (0, 1)");
  if (!(cfg.mu > 0.0)) fail("mu", "must be > 0");
  if (!(cfg.lm_nu > 0.0)) fail("lm_nu", "must be > 0");
  if (cfg.schedule.empty()) fail("schedule", "must not be empty");
  for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
    if (cfg.schedule[i] < 1) fail("schedule", "entries must be positive");
    if (i > 0 && cfg.schedule[i] <= cfg.schedule[i - 1]) fail("schedule", "must be strictly increasing");
  }
  if (!(cfg.tol_r > 0.0)) fail("tol_r", "must be > 0");
  if (!(cfg.eps > 0.0)) fail("eps", "must be > 0");
  if (!(cfg.c1 > 0.0 && cfg.c1 < 1.0)) fail("c1", "must lie in (0, 1)");
  if (!(cfg.c2 > cfg.c1 && cfg.c2 < 1.0)) fail("c2", "must lie in (c1, 1)");
  if (cfg.k_max < 1) fail("k_max", "must be >= 1");
  if (!(cfg.descent_r > 0.0)) fail("descent_r", "must be > 0");
}

Vec lm_step(const Mat& A_bar, const Vec& F_bar, double lm_nu) {
  if (!(lm_nu > 0.0)) throw InvalidInput("lm_step: nu must be > 0");
  if (!A_bar.allFinite() || !F_bar.allFinite()) throw NumericError("lm_step: non-finite system");
  Mat H = A_bar.transpose() * A_bar;
  H.diagonal().array() += lm_nu;
  const Eigen::LLT<Mat> llt(H);
  if (llt.info() != Eigen::Success) throw NumericError("lm_step: factorization failed");
  Vec d = llt.solve(-(A_bar.transpose() * F_bar));
  if (!d.allFinite()) throw NumericError("lm_step: non-finite direction");
  return d;
}

Vec lm_direction(const ProblemSpec& spec, const SampleSet& s, const SAAPoint& q, double lm_nu) {
  check_point(spec.dims, q.p, "lm_direction");
  const ScenarioBatch b = evaluate_scenarios(spec, s, q.p.pack(), true);
  return lm_step(b.jacobian_mean, b.residual_mean, lm_nu);
}

double aloc(const ProblemSpec& spec, const SampleSet& s, const Vec& x, const Vec& u) {
  const auto& d = spec.dims;
  if (x.size() != d.k || u.size() != d.l) throw InvalidInput("aloc: point dimension mismatch");
  if (s.draws.cols() != spec.omega_dim) throw InvalidInput("aloc: sample dimension mismatch");
  if (s.draws.rows() < 1) throw InvalidInput("aloc: empty sample set");
  Vec z(d.m());
  z << x, u;
  Realization re;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.draws.rows(); ++i) {
    realize_into(spec, s.draws.row(i).transpose(), re);
    acc += std::abs(z.dot(re.T * z + re.r));
  }
  return acc / static_cast<double>(s.draws.rows());
}

MixPoint default_start(const ConeDims& dims) {
  MixPoint p;
  p.x_m = Vec::Zero(dims.k);
  p.u = Vec::Constant(dims.l, 0.1 / std::sqrt(static_cast<double>(dims.l)));
  p.t = p.u.norm();
  return p;
}

SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg, const std::optional<SAAPoint>& start) {
  validate(spec);
  validate(cfg);
  const ConeDims& dims = spec.dims;
  MixPoint p0 = start ? start->p : default_start(dims);
  check_point(dims, p0, "solve");
  Vec z = p0.pack();
  if (!z.allFinite()) throw InvalidInput("solve: start point is not finite");

  const SampleSet ev_sample = mean_sample(spec);
  const Vec omega_bar = mean_omega(spec);

  SolveReport rep;
  rep.mode = cfg.mode;
  Vec z_prev = z;
  const int stages = static_cast<int>(cfg.schedule.size());
  for (int j = 1; j <= stages; ++j) {
    const int n = cfg.schedule[static_cast<std::size_t>(j - 1)];
    const SampleSet samples = draw_samples(spec.distribution, spec.omega_dim, n, stage_seed(cfg.seed, j));
    const SampleSet& fit = cfg.mode == SolveMode::Ev ? ev_sample : samples;

    const auto t0 = std::chrono::steady_clock::now();
    const InnerResult in = run_inner(StageObjective(spec, cfg, fit), cfg, z);
    const auto t1 = std::chrono::steady_clock::now();
    z = in.z;

    StageResult st;
    st.j = j;
    st.N = n;
    st.point.p = MixPoint::unpack(dims, z);
    const Vec losses = scenario_losses(spec, samples, st.point.p);
    st.point.Theta = theta_star(as_span(losses), cfg.alpha, cfg.mu, cfg.smoothing);
    st.objective = in.value;
    st.grad_inf_norm = in.grad_inf_norm;
    st.inner_iters = in.iters;
    st.termination = in.termination;
    st.wall_time = std::chrono::duration<double>(t1 - t0).count();
    st.recovered = recover_lcp_point(st.point.p);
    st.F_at_mean = f_eval(spec, omega_bar, st.recovered.x, st.recovered.u);
    st.aloc = aloc(spec, samples, st.recovered.x, st.recovered.u);
    st.objective_history = in.history;

    const bool converged = j > 1 && (z - z_prev).norm() < cfg.eps;
    if (converged) st.termination = Termination::OuterEps;
    rep.stages.push_back(std::move(st));
    if (converged) break;
    z_prev = z;
  }

  const StageResult& last = rep.stages.back();
  rep.final_mix = last.point;
  rep.recovered = last.recovered;
  rep.F_at_mean = last.F_at_mean;
  rep.aloc = last.aloc;
  rep.theta_threshold = last.point.Theta;
  return rep;
}

}  // namespace slcp
