#include "slcp/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "slcp/cone.hpp"
#include "slcp/error.hpp"
#include "slcp/merit.hpp"
#include "slcp/problem.hpp"
#include "slcp/reformulate.hpp"
#include "slcp/report.hpp"
#include "slcp/saa.hpp"
#include "slcp/solver.hpp"

namespace slcp {

namespace {

struct ProblemSource {
  std::string path;
  bool builtin = false;

  void add_to(CLI::App& cmd) {
    auto* p = cmd.add_option("--problem", path, "problem file (JSON)");
    auto* b = cmd.add_flag("--builtin", builtin, "use the built-in L(3,2) example");
    p->excludes(b);
  }

  ProblemSpec load() const {
    if (builtin) return builtin_example();
    if (path.empty()) throw InvalidInput("one of --problem or --builtin is required");
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot read problem file '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      return load_problem(buf.str());
    } catch (const ParseError& e) {
      throw InvalidInput(fmt::format("{}: {}", path, e.what()));
    } catch (const ValidationError& e) {
      throw InvalidInput(fmt::format("{}: {}", path, e.what()));
    }
  }
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) {
    throw InvalidInput(fmt::format("cannot write '{}'", out_path));
  }
}

struct SolveArgs {
  ProblemSource src;
  SolverConfig cfg;
  std::string mode = "cvar";
  std::string smoothing = "chks";
  std::string format = "table";
  std::string out_path;
  bool no_timing = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const ProblemSpec spec = a.src.load();
  SolverConfig cfg = a.cfg;
  const auto mode = parse_mode(a.mode);
  if (!mode) throw InvalidInput(fmt::format("--mode: unknown mode '{}'", a.mode));
  cfg.mode = *mode;
  const auto kind = parse_smoothing(a.smoothing);
  if (!kind) throw InvalidInput(fmt::format("--smoothing: unknown smoother '{}'", a.smoothing));
  cfg.smoothing = *kind;
  const auto fmt_kind = parse_format(a.format);
  if (!fmt_kind) throw InvalidInput(fmt::format("--format: unknown format '{}'", a.format));

  const SolveReport rep = solve(spec, cfg);
  emit(render_report(rep, spec.dims, *fmt_kind, !a.no_timing), a.out_path, out);
  const Termination last = rep.stages.back().termination;
  return last == Termination::KMax || last == Termination::Stalled ? 2 : 0;
}

struct CheckArgs {
  ProblemSource src;
  std::vector<double> point;
  int samples = 100000;
  std::uint64_t seed = 42;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  const ProblemSpec spec = a.src.load();
  const ConeDims& d = spec.dims;
  if (static_cast<int>(a.point.size()) != d.m()) {
    throw InvalidInput(fmt::format("--point: expected {} numbers (x then u), got {}", d.m(),
                                   a.point.size()));
  }
  if (a.samples < 1) throw InvalidInput("--samples: must be >= 1");
  const Vec z = Eigen::Map<const Vec>(a.point.data(), d.m());
  const Vec x = z.head(d.k);
  const Vec u = z.tail(d.l);
  const Vec omega = mean_omega(spec);
  const Vec F = f_eval(spec, omega, x, u);
  const Vec y = F.head(d.k);
  const Vec v = F.tail(d.l);

  const CompCase cc = classify_complementarity(d, x, u, y, v);
  const double merit = merit_theta(spec, omega, init_from_lcp(x, u));
  const SampleSet s = draw_samples(spec.distribution, spec.omega_dim, a.samples, a.seed);

  out << fmt::format("in_L(x, u): {}\n", in_L(d, {x, u}));
  out << fmt::format("in_M(F): {}\n", in_M(d, {y, v}));
  out << fmt::format("case: {}\n", to_string(cc.kind));
  if (cc.lambda) out << fmt::format("lambda: {:.6g}\n", *cc.lambda);
  out << fmt::format("merit: {:.6g}\n", merit);
  out << fmt::format("aloc (N={}, seed={}): {:.6g}\n", a.samples, a.seed, aloc(spec, s, x, u));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic LCP solver on extended second order cones", "slcp"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem and print the stage report");
  sa.src.add_to(*solve_cmd);
  auto& c = sa.cfg;
  solve_cmd->add_option("--alpha", c.alpha, "CVaR tail level")->capture_default_str();
  solve_cmd->add_option("--mu", c.mu, "smoothing parameter")->capture_default_str();
  solve_cmd->add_option("--lm-nu", c.lm_nu, "Levenberg-Marquardt damping")->capture_default_str();
  solve_cmd->add_option("--schedule", c.schedule, "sample sizes per stage")
      ->delimiter(',')
      ->capture_default_str();
  solve_cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  solve_cmd->add_option("--tol", c.tol_r, "gradient tolerance")->capture_default_str();
  solve_cmd->add_option("--eps", c.eps, "outer displacement tolerance")->capture_default_str();
  solve_cmd->add_option("--c1", c.c1, "sufficient decrease constant")->capture_default_str();
  solve_cmd->add_option("--c2", c.c2, "curvature constant")->capture_default_str();
  solve_cmd->add_option("--kmax", c.k_max, "inner iteration cap")->capture_default_str();
  solve_cmd->add_option("--mode", sa.mode, "cvar, ev or erm")->capture_default_str();
  solve_cmd->add_option("--smoothing", sa.smoothing, "chks, nn, ip or asip")->capture_default_str();
  solve_cmd->add_option("--format", sa.format, "table, csv or json")->capture_default_str();
  solve_cmd->add_option("--out", sa.out_path, "write the report here instead of stdout");
  solve_cmd->add_flag("--no-timing", sa.no_timing, "omit wall times");

  std::string example_out;
  auto* example_cmd = app.add_subcommand("example", "write the built-in problem file");
  example_cmd->add_option("--out", example_out, "output path (default stdout)");

  CheckArgs ca;
  auto* check_cmd = app.add_subcommand("check", "diagnose a candidate point");
  ca.src.add_to(*check_cmd);
  check_cmd->add_option("--point", ca.point, "x1,...,xk,u1,...,ul")->delimiter(',')->required();
  check_cmd->add_option("--samples", ca.samples, "samples for ALoC")->capture_default_str();
  check_cmd->add_option("--seed", ca.seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa, out);
    if (*example_cmd) {
      emit(serialize_problem(builtin_example()), example_out, out);
      return 0;
    }
    return cmd_check(ca, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace slcp
