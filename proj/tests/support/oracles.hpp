#pragma once
// Brute-force reference implementations for the tests. Everything here works
// on plain full-space arrays and deliberately avoids the library's own
// marginalisation, projection and partition code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "mahgenta/core.hpp"
#include "mahgenta/loglinear.hpp"

namespace oracle {

using mahgenta::DenseTensor;
using mahgenta::InteractionCollection;
using mahgenta::ProbTensor;
using mahgenta::Shape;
using mahgenta::ThetaModel;
using mahgenta::VarSubset;

inline std::size_t cells(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

// digits of a flat row-major index, last variable fastest
inline std::vector<int> digits(std::size_t flat, const std::vector<int>& cards) {
  std::vector<int> out(cards.size());
  for (std::size_t k = cards.size(); k-- > 0;) {
    out[k] = static_cast<int>(flat % static_cast<std::size_t>(cards[k]));
    flat /= static_cast<std::size_t>(cards[k]);
  }
  return out;
}

inline std::size_t sub_index(const std::vector<int>& dig, const std::vector<int>& cards,
                             const std::vector<int>& members) {
  std::size_t idx = 0;
  for (int k : members) idx = idx * static_cast<std::size_t>(cards[k]) + static_cast<std::size_t>(dig[k]);
  return idx;
}

// Marginal of a full table on `members` (0-based, ascending).
inline std::vector<double> marginal(const std::vector<double>& p, const std::vector<int>& cards,
                                    const std::vector<int>& members) {
  std::vector<int> sub;
  for (int k : members) sub.push_back(cards[k]);
  std::vector<double> out(cells(sub), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) out[sub_index(digits(i, cards), cards, members)] += p[i];
  return out;
}

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

inline double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline std::vector<double> values(const ProbTensor& p) { return {p.values().begin(), p.values().end()}; }

inline std::vector<std::vector<int>> all_subsets(const std::vector<int>& members) {
  std::vector<std::vector<int>> out;
  const std::size_t n = members.size();
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    std::vector<int> s;
    for (std::size_t j = 0; j < n; ++j) {
      if ((m >> j) & 1U) s.push_back(members[j]);
    }
    out.push_back(s);
  }
  return out;
}

// Classical IPF over the whole table, cycling over the given subsets.
inline std::vector<double> ipf(const std::vector<double>& p, const std::vector<int>& cards,
                               const std::vector<std::vector<int>>& subsets, double tol = 1e-12,
                               int max_cycles = 200000) {
  std::vector<double> q(p.size(), 1.0 / static_cast<double>(p.size()));
  std::vector<std::vector<double>> targets;
  for (const auto& s : subsets) targets.push_back(marginal(p, cards, s));
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    double worst = 0.0;
    for (std::size_t t = 0; t < subsets.size(); ++t) {
      const auto m = marginal(q, cards, subsets[t]);
      for (std::size_t j = 0; j < m.size(); ++j) worst = std::max(worst, std::abs(m[j] - targets[t][j]));
      for (std::size_t i = 0; i < q.size(); ++i) {
        const std::size_t j = sub_index(digits(i, cards), cards, subsets[t]);
        q[i] = m[j] > 0.0 ? q[i] * targets[t][j] / m[j] : 0.0;
      }
    }
    if (worst < tol) break;
  }
  return q;
}

inline std::vector<std::vector<int>> members_of(const InteractionCollection& c) {
  std::vector<std::vector<int>> out;
  for (VarSubset s : c.sorted()) {
    if (!s.empty()) out.push_back(s.members());
  }
  return out;
}

// Full table of a model by direct summation of energies.
inline std::vector<double> model_table(const ThetaModel& m, double* log_z = nullptr) {
  const auto& cards = m.shape().cardinalities();
  std::vector<double> e(cells(cards));
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto dig = digits(i, cards);
    e[i] = m.energy(dig);
    mx = std::max(mx, e[i]);
  }
  double z = 0.0;
  for (double v : e) z += std::exp(v - mx);
  for (double& v : e) v = std::exp(v - mx) / z;
  if (log_z) *log_z = mx + std::log(z);
  return e;
}

// Independent fibre centring: Moebius sum over T ⊆ S of (-1)^{|S-T|}
// expand_uniform(mean of t over S-T).
inline std::vector<double> moebius_center(const std::vector<double>& t, const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> out(t.size(), 0.0);
  for (const auto& keep : all_subsets(all)) {
    const auto mean = marginal(t, dims, keep);
    double scale = 1.0;
    for (int k = 0; k < n; ++k) {
      if (std::find(keep.begin(), keep.end(), k) == keep.end()) scale /= dims[static_cast<std::size_t>(k)];
    }
    const double sign = ((n - static_cast<int>(keep.size())) % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      out[i] += sign * scale * mean[sub_index(digits(i, dims), dims, keep)];
    }
  }
  return out;
}

// --- fixtures --------------------------------------------------------------------

inline ProbTensor make_dist(const std::vector<int>& cards, std::vector<double> v) {
  const Shape shape(cards);
  return ProbTensor(DenseTensor(shape.all(), cards, std::move(v)));
}

// mass 1/4 on each even-parity triple over [2]^3
inline ProbTensor xor3() {
  std::vector<double> v(8, 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) v[static_cast<std::size_t>(a * 4 + b * 2 + (a ^ b))] = 0.25;
  }
  return make_dist({2, 2, 2}, v);
}

inline ProbTensor random_dist(const std::vector<int>& cards, std::mt19937_64& rng, double floor = 0.0) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> v(cells(cards));
  double s = 0.0;
  for (double& x : v) {
    x = g(rng) + floor;
    s += x;
  }
  for (double& x : v) x /= s;
  return make_dist(cards, v);
}

inline DenseTensor random_centered(const Shape& shape, VarSubset s, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  DenseTensor t = DenseTensor::zeros(shape, s);
  for (double& x : t.values()) x = n(rng);
  return mahgenta::center_fibers(std::move(t));
}

inline ThetaModel random_model(const Shape& shape, const InteractionCollection& c, std::mt19937_64& rng,
                               double sigma = 1.0) {
  ThetaModel m(shape, c);
  for (VarSubset s : m.subsets()) m.set_theta(s, random_centered(shape, s, rng, sigma));
  return m;
}

// A random hierarchical collection over [d]: downward closure of a few random subsets.
inline InteractionCollection random_hierarchical(int d, std::mt19937_64& rng) {
  InteractionCollection c;
  std::uniform_int_distribution<std::uint64_t> pick(1, (std::uint64_t{1} << d) - 1);
  std::uniform_int_distribution<int> count(1, 3);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    for (VarSubset t : mahgenta::subsets_of(VarSubset::from_mask(pick(rng)))) c.add(t);
  }
  return c;
}

}  // namespace oracle
