#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "slcp/cone.hpp"
#include "slcp/problem.hpp"

namespace slcp::testing {

inline Vec normal_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vec v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

inline Mat normal_mat(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Mat m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

/// Random instance with a few perturbed entries of T and r.
inline ProblemSpec random_spec(std::mt19937_64& rng, int k, int l, int omega_dim, int n_perturb = 3) {
  ProblemSpec s;
  s.dims = {k, l};
  s.omega_dim = omega_dim;
  const int m = k + l;
  s.T_base = normal_mat(rng, m, m);
  s.r_base = normal_vec(rng, m);
  std::uniform_int_distribution<int> row(0, m - 1);
  std::uniform_int_distribution<int> om(0, omega_dim - 1);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (int i = 0; i < n_perturb; ++i) {
    s.T_perturb.push_back({row(rng), row(rng), nd(rng), om(rng)});
    s.r_perturb.push_back({row(rng), std::nullopt, nd(rng), om(rng)});
  }
  return s;
}

/// Deterministic instance with a known solution of case IV: u != 0,
/// v = -lambda u, e'y = |v| and (x - |u| e, y) strictly complementary.
/// The data T is random; r is chosen so that F(x, u) = (y, v).
struct CaseIV {
  ProblemSpec spec;
  Vec x, u, y, v;
  double lambda = 0.0;
};

inline CaseIV make_case_iv(std::uint64_t seed, int k = 3, int l = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  CaseIV c;
  c.u = normal_vec(rng, l);
  c.lambda = pos(rng);
  c.v = -c.lambda * c.u;
  // first coordinate carries y, the others carry the slack of x
  Vec xs = Vec::Zero(k);
  c.y = Vec::Zero(k);
  c.y[0] = c.v.norm();
  for (int i = 1; i < k; ++i) xs[i] = pos(rng);
  c.x = xs.array() + c.u.norm();

  ProblemSpec& s = c.spec;
  s.dims = {k, l};
  s.omega_dim = 1;
  const int m = k + l;
  s.T_base = normal_mat(rng, m, m);
  s.T_base.diagonal().array() += 3.0;
  Vec z(m);
  z << c.x, c.u;
  Vec w(m);
  w << c.y, c.v;
  s.r_base = w - s.T_base * z;
  return c;
}

/// Two losses on 1000 outcomes: standard normal noise, plus 10 on nine
/// outcomes each, with disjoint jump sets. Each loss alone keeps its jumps
/// inside the 1% tail; their sum does not.
inline std::pair<std::vector<double>, std::vector<double>> jump_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> a(1000), b(1000);
  for (auto& x : a) x = nd(rng);
  for (auto& x : b) x = nd(rng);
  std::vector<int> idx(1000);
  for (int i = 0; i < 1000; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int i = 0; i < 9; ++i) {
    a[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] += 10.0;
    b[static_cast<std::size_t>(idx[static_cast<std::size_t>(i + 9)])] += 10.0;
  }
  return {a, b};
}

/// Central differences of a scalar function.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h = 1e-6) {
  Vec g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vec a = z, b = z;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Central differences of a vector function; column i is d f / d z_i.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& z, double h = 1e-6) {
  const Vec f0 = f(z);
  Mat J(f0.size(), z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vec a = z, b = z;
    a[i] += h;
    b[i] -= h;
    J.col(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

/// |a - b| / |b| in the max norm, with the denominator floored at `floor`.
template <typename A, typename B>
double rel_err(const A& a, const B& b, double floor = 1e-8) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), floor);
}

}  // namespace slcp::testing
