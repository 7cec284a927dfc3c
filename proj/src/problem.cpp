#include "slcp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "slcp/error.hpp"

namespace slcp {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(byte, text.size());
  // nlohmann reports the 1-based position of the offending byte
  for (std::size_t i = 0; i + 1 < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void expect_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(fmt::format("{}: expected an object", where));
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ValidationError(fmt::format("{}: unknown key '{}'", where, key));
  }
  for (const char* key : keys) {
    if (!obj.contains(key)) throw ValidationError(fmt::format("{}: missing key '{}'", where, key));
  }
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ValidationError(fmt::format("{}: '{}' must be an integer", where, key));
  }
  return v.get<int>();
}

double get_num(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(fmt::format("{}: expected a number", where));
  return v.get<double>();
}

Vec get_vec(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(fmt::format("{}: expected an array", where));
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = get_num(v[i], fmt::format("{}[{}]", where, i));
  }
  return out;
}

PerturbEntry get_entry(const json& e, bool matrix, const std::string& where) {
  if (matrix) {
    expect_keys(e, {"row", "col", "coeff", "omega"}, where);
  } else {
    expect_keys(e, {"row", "coeff", "omega"}, where);
  }
  PerturbEntry out;
  out.row = get_int(e, "row", where);
  if (matrix) out.col = get_int(e, "col", where);
  out.coeff = get_num(e.at("coeff"), where + ".coeff");
  out.omega_index = get_int(e, "omega", where);
  return out;
}

json entry_json(const PerturbEntry& e) {
  json j = json::object();
  j["row"] = e.row;
  if (e.col) j["col"] = *e.col;
  j["coeff"] = e.coeff;
  j["omega"] = e.omega_index;
  return j;
}

}  // namespace

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  return dims == o.dims && omega_dim == o.omega_dim && T_base.rows() == o.T_base.rows() &&
         T_base.cols() == o.T_base.cols() && T_base == o.T_base && r_base.size() == o.r_base.size() &&
         r_base == o.r_base && T_perturb == o.T_perturb && r_perturb == o.r_perturb &&
         distribution == o.distribution;
}

void validate(const ProblemSpec& spec) {
  const auto& d = spec.dims;
  if (d.k < 1) throw ValidationError(fmt::format("k must be >= 1 (got {})", d.k));
  if (d.l < 1) throw ValidationError(fmt::format("l must be >= 1 (got {})", d.l));
  if (spec.omega_dim < 1) {
    throw ValidationError(fmt::format("omega_dim must be >= 1 (got {})", spec.omega_dim));
  }
  const int m = d.m();
  if (spec.T_base.rows() != m || spec.T_base.cols() != m) {
    throw ValidationError(fmt::format("T_base must be {0}x{0} for k={1}, l={2} (got {3}x{4})", m,
                                      d.k, d.l, spec.T_base.rows(), spec.T_base.cols()));
  }
  if (spec.r_base.size() != m) {
    throw ValidationError(
        fmt::format("r_base must have length {} (got {})", m, spec.r_base.size()));
  }
  if (!spec.T_base.allFinite() || !spec.r_base.allFinite()) {
    throw ValidationError("T_base and r_base must be finite");
  }
  auto check = [&](const PerturbEntry& e, const char* list, std::size_t idx) {
    const std::string where = fmt::format("{}[{}]", list, idx);
    if (e.row < 0 || e.row >= m) {
      throw ValidationError(fmt::format("{}: row {} out of range [0, {})", where, e.row, m));
    }
    if (e.col && (*e.col < 0 || *e.col >= m)) {
      throw ValidationError(fmt::format("{}: col {} out of range [0, {})", where, *e.col, m));
    }
    if (e.omega_index < 0 || e.omega_index >= spec.omega_dim) {
      throw ValidationError(fmt::format("{}: omega index {} out of range [0, {})", where,
                                        e.omega_index, spec.omega_dim));
    }
    if (!std::isfinite(e.coeff)) throw ValidationError(where + ": coeff must be finite");
  };
  for (std::size_t i = 0; i < spec.T_perturb.size(); ++i) {
    if (!spec.T_perturb[i].col) {
      throw ValidationError(fmt::format("T_perturb[{}]: missing col", i));
    }
    check(spec.T_perturb[i], "T_perturb", i);
  }
  for (std::size_t i = 0; i < spec.r_perturb.size(); ++i) {
    if (spec.r_perturb[i].col) {
      throw ValidationError(fmt::format("r_perturb[{}]: unexpected col", i));
    }
    check(spec.r_perturb[i], "r_perturb", i);
  }
  if (!(spec.distribution.std > 0.0) || !std::isfinite(spec.distribution.std)) {
    throw ValidationError("distribution.std must be positive");
  }
  if (!std::isfinite(spec.distribution.mean)) {
    throw ValidationError("distribution.mean must be finite");
  }
}

ProblemSpec load_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    throw ParseError(fmt::format("problem file: parse error at line {}, column {}: {}", line, col,
                                 e.what()),
                     line, col);
  }

  expect_keys(doc, {"k", "l", "omega_dim", "T_base", "r_base", "T_perturb", "r_perturb",
                    "distribution"},
              "problem");
  ProblemSpec spec;
  spec.dims.k = get_int(doc, "k", "problem");
  spec.dims.l = get_int(doc, "l", "problem");
  spec.omega_dim = get_int(doc, "omega_dim", "problem");

  const json& rows = doc.at("T_base");
  if (!rows.is_array()) throw ValidationError("T_base: expected an array of rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n_cols =
      rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].is_array() ? rows[0].size() : 0);
  spec.T_base.resize(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const Vec row = get_vec(rows[static_cast<std::size_t>(i)], fmt::format("T_base[{}]", i));
    if (row.size() != n_cols) throw ValidationError("T_base: rows have different lengths");
    spec.T_base.row(i) = row.transpose();
  }
  spec.r_base = get_vec(doc.at("r_base"), "r_base");

  for (const char* list : {"T_perturb", "r_perturb"}) {
    const json& arr = doc.at(list);
    if (!arr.is_array()) throw ValidationError(fmt::format("{}: expected an array", list));
    const bool matrix = std::string_view(list) == "T_perturb";
    auto& dst = matrix ? spec.T_perturb : spec.r_perturb;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      dst.push_back(get_entry(arr[i], matrix, fmt::format("{}[{}]", list, i)));
    }
  }

  const json& dist = doc.at("distribution");
  expect_keys(dist, {"kind", "mean", "std"}, "distribution");
  if (!dist.at("kind").is_string() || dist.at("kind").get<std::string>() != "iid_normal") {
    throw ValidationError("distribution.kind: only \"iid_normal\" is supported");
  }
  spec.distribution.kind = DistributionKind::IidNormal;
  spec.distribution.mean = get_num(dist.at("mean"), "distribution.mean");
  spec.distribution.std = get_num(dist.at("std"), "distribution.std");

  validate(spec);
  return spec;
}

std::string serialize_problem(const ProblemSpec& spec) {
  json doc = json::object();
  doc["k"] = spec.dims.k;
  doc["l"] = spec.dims.l;
  doc["omega_dim"] = spec.omega_dim;
  json rows = json::array();
  for (Eigen::Index i = 0; i < spec.T_base.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < spec.T_base.cols(); ++j) row.push_back(spec.T_base(i, j));
    rows.push_back(std::move(row));
  }
  doc["T_base"] = std::move(rows);
  doc["r_base"] = std::vector<double>(spec.r_base.begin(), spec.r_base.end());
  json tp = json::array();
  for (const auto& e : spec.T_perturb) tp.push_back(entry_json(e));
  doc["T_perturb"] = std::move(tp);
  json rp = json::array();
  for (const auto& e : spec.r_perturb) rp.push_back(entry_json(e));
  doc["r_perturb"] = std::move(rp);
  doc["distribution"] = {{"kind", "iid_normal"},
                         {"mean", spec.distribution.mean},
                         {"std", spec.distribution.std}};
  return doc.dump(2) + "\n";
}

void realize_into(const ProblemSpec& spec, const Eigen::Ref<const Vec>& omega, Realization& out) {
  if (omega.size() != spec.omega_dim) {
    throw InvalidInput(fmt::format("realize: omega has length {}, expected {}", omega.size(),
                                   spec.omega_dim));
  }
  out.T = spec.T_base;
  out.r = spec.r_base;
  for (const auto& e : spec.T_perturb) out.T(e.row, *e.col) += e.coeff * omega[e.omega_index];
  for (const auto& e : spec.r_perturb) out.r[e.row] += e.coeff * omega[e.omega_index];
}

Realization realize(const ProblemSpec& spec, const Vec& omega) {
  Realization out;
  realize_into(spec, omega, out);
  return out;
}

Vec f_eval(const ProblemSpec& spec, const Vec& omega, const Vec& x, const Vec& u) {
  const auto& d = spec.dims;
  if (x.size() != d.k || u.size() != d.l) {
    throw InvalidInput(fmt::format("f_eval: expected x of length {} and u of length {}", d.k, d.l));
  }
  const Realization re = realize(spec, omega);
  Vec z(d.m());
  z << x, u;
  return re.T * z + re.r;
}

ProblemSpec builtin_example() {
  ProblemSpec spec;
  spec.dims = {3, 2};
  spec.omega_dim = 3;
  spec.T_base.resize(5, 5);
  // clang-format off
  spec.T_base <<  41,  -3, -31,  18,  19,
                  28,  22, -33,  25, -29,
                 -23, -29,  11, -21, -43,
                  -9, -31, -20, -12,  47,
                  -8,  46,  50, -22,  21;
  // clang-format on
  spec.r_base.resize(5);
  spec.r_base << -26, 4, 23, 44, -19;
  spec.T_perturb = {{0, 0, 1.0, 0}, {3, 2, 2.0, 1}};
  spec.r_perturb = {{1, std::nullopt, -1.0, 2}};
  spec.distribution = {DistributionKind::IidNormal, 0.0, 1.0};
  return spec;
}

Vec mean_omega(const ProblemSpec& spec) {
  return Vec::Constant(spec.omega_dim, spec.distribution.mean);
}

}  // namespace slcp
