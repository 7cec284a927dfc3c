#include "slcp/report.hpp"

#include <json.hpp>
#include <fmt/format.h>

namespace slcp {

namespace {

// Shortest representation that reads back to the same double.
std::string exact(double v) { return fmt::format("{}", v); }

std::string table_num(double v) { return fmt::format("{:.6g}", v); }

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::string render_csv(const SolveReport& rep, const ConeDims& dims, bool timing) {
  std::string out = csv_header(dims) + "\n";
  for (const auto& st : rep.stages) {
    out += fmt::format("{},{}", st.j, st.N);
    for (double v : st.recovered.x) out += "," + exact(v);
    for (double v : st.recovered.u) out += "," + exact(v);
    for (double v : st.F_at_mean) out += "," + exact(v);
    out += ",";
    if (timing) out += exact(st.wall_time);
    out += fmt::format(",{},{}\n", exact(st.aloc), exact(st.point.Theta));
  }
  return out;
}

std::string render_json(const SolveReport& rep, bool timing) {
  using nlohmann::json;
  json stages = json::array();
  for (const auto& st : rep.stages) {
    stages.push_back({
        {"j", st.j},
        {"N", st.N},
        {"x", to_std(st.recovered.x)},
        {"u", to_std(st.recovered.u)},
        {"F", to_std(st.F_at_mean)},
        {"time_s", timing ? json(st.wall_time) : json(nullptr)},
        {"aloc", st.aloc},
        {"theta", st.point.Theta},
        {"objective", st.objective},
        {"grad_inf_norm", st.grad_inf_norm},
        {"inner_iters", st.inner_iters},
        {"termination", std::string(to_string(st.termination))},
    });
  }
  json doc = {
      {"mode", std::string(to_string(rep.mode))},
      {"stages", std::move(stages)},
      {"final",
       {
           {"x", to_std(rep.recovered.x)},
           {"u", to_std(rep.recovered.u)},
           {"x_m", to_std(rep.final_mix.p.x_m)},
           {"t", rep.final_mix.p.t},
           {"F", to_std(rep.F_at_mean)},
           {"aloc", rep.aloc},
           {"theta", rep.theta_threshold},
       }},
  };
  return doc.dump(2) + "\n";
}

std::string render_table(const SolveReport& rep, const ConeDims& dims) {
  std::string out = fmt::format("mode: {}\n\n", to_string(rep.mode));
  std::string head = fmt::format("{:>3} {:>8}", "j", "N");
  for (int i = 1; i <= dims.k; ++i) head += fmt::format(" {:>12}", fmt::format("x{}", i));
  for (int i = 1; i <= dims.l; ++i) head += fmt::format(" {:>12}", fmt::format("u{}", i));
  for (int i = 1; i <= dims.m(); ++i) head += fmt::format(" {:>12}", fmt::format("F{}", i));
  out += head + "\n";
  for (const auto& st : rep.stages) {
    std::string row = fmt::format("{:>3} {:>8}", st.j, st.N);
    for (double v : st.recovered.x) row += fmt::format(" {:>12}", table_num(v));
    for (double v : st.recovered.u) row += fmt::format(" {:>12}", table_num(v));
    for (double v : st.F_at_mean) row += fmt::format(" {:>12}", table_num(v));
    out += row + "\n";
  }
  out += fmt::format("\n{:>3} {:>8} {:>12} {:>12} {:>12} {:>6} {:>10}\n", "j", "N", "time_s", "aloc",
                     "theta", "iters", "stop");
  for (const auto& st : rep.stages) {
    // negative wall time marks a report rendered without timing
    out += fmt::format("{:>3} {:>8} {:>12} {:>12} {:>12} {:>6} {:>10}\n", st.j, st.N,
                       st.wall_time < 0 ? std::string("-") : table_num(st.wall_time),
                       table_num(st.aloc), table_num(st.point.Theta), st.inner_iters,
                       to_string(st.termination));
  }
  return out;
}

}  // namespace

std::optional<ReportFormat> parse_format(std::string_view name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

std::string csv_header(const ConeDims& dims) {
  std::string h = "j,N";
  for (int i = 1; i <= dims.k; ++i) h += fmt::format(",x{}", i);
  for (int i = 1; i <= dims.l; ++i) h += fmt::format(",u{}", i);
  for (int i = 1; i <= dims.m(); ++i) h += fmt::format(",F{}", i);
  return h + ",time_s,aloc,theta";
}

std::string render_report(const SolveReport& rep, const ConeDims& dims, ReportFormat fmt,
                          bool timing) {
  switch (fmt) {
    case ReportFormat::Csv:
      return render_csv(rep, dims, timing);
    case ReportFormat::Json:
      return render_json(rep, timing);
    case ReportFormat::Table:
      break;
  }
  if (timing) return render_table(rep, dims);
  SolveReport quiet = rep;
  for (auto& st : quiet.stages) st.wall_time = -1.0;
  return render_table(quiet, dims);
}

}  // namespace slcp
