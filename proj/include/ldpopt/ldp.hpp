// Copyright 2026 The ldpopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Row-wise linear privacy families
//
//   J(gamma, nu) = { T : T(j, i) <= gamma_j * T(j, i') + nu_j  for all j, i, i' }
//
// which cover pure LDP (gamma_j = e^eps, nu_j = 0), singleton-event LDP
// (nu_j = delta) and binary-output approximate LDP. Also: randomized
// response, extreme-point catalogs and exact vertex enumeration, tightness
// classification with the forbidden six-entry pattern, and the binary Renyi
// constraint.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ldpopt/core.hpp"
#include "ldpopt/threshold.hpp"

namespace ldpopt {

inline constexpr double kMaxEps = 700.0;
inline constexpr double kMembershipTolerance = 1e-12;
inline constexpr double kColumnTolerance = 1e-9;

// e^eps with eps clamped to kMaxEps so the result stays finite.
inline double ExpEps(double eps) { return std::exp(std::min(eps, kMaxEps)); }

struct LpFamily {
  std::vector<double> gamma;
  std::vector<double> nu;
  int k = 0;
  int l = 0;

  void Validate() const {
    if (k < 1 || l < 1) throw std::invalid_argument("family: k, l >= 1");
    if (gamma.size() != static_cast<std::size_t>(l) ||
        nu.size() != static_cast<std::size_t>(l)) {
      throw std::invalid_argument("family: gamma and nu need l entries");
    }
    for (std::size_t j = 0; j < gamma.size(); ++j) {
      if (!(gamma[j] >= 1.0) || !(nu[j] >= 0.0) || std::isinf(gamma[j])) {
        throw std::invalid_argument(
            "family: need finite gamma_j >= 1 and nu_j >= 0");
      }
    }
  }

  // Same per-row parameters over a different input alphabet.
  LpFamily WithInputs(int inputs) const {
    LpFamily out = *this;
    out.k = inputs;
    return out;
  }

  bool IsPure() const {
    for (std::size_t j = 0; j < gamma.size(); ++j) {
      if (gamma[j] != gamma.front() || nu[j] != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const LpFamily&, const LpFamily&) = default;
};

inline LpFamily pure_ldp_family(int k, int l, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  LpFamily f{std::vector<double>(l, ExpEps(eps)), std::vector<double>(l, 0.0),
             k, l};
  f.Validate();
  return f;
}

inline LpFamily sldp_family(int k, int l, double eps, double delta) {
  if (!(eps >= 0.0) || !(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("sldp: need eps >= 0 and delta in [0, 1]");
  }
  LpFamily f{std::vector<double>(l, ExpEps(eps)),
             std::vector<double>(l, delta), k, l};
  f.Validate();
  return f;
}

// (eps, delta)-LDP channels with two outputs.
inline LpFamily approx_binary_family(int k, double eps, double delta) {
  return sldp_family(k, 2, eps, delta);
}

// nu_j = 1 makes every column-stochastic matrix a member.
inline LpFamily unconstrained_family(int k, int l) {
  LpFamily f{std::vector<double>(l, 1.0), std::vector<double>(l, 1.0), k, l};
  f.Validate();
  return f;
}

inline Channel randomized_response(int k, double eps) {
  if (k < 2) throw std::invalid_argument("randomized_response: k >= 2");
  if (!(eps >= 0.0)) throw std::invalid_argument("randomized_response: eps");
  const double e = ExpEps(eps);
  const double denom = (k - 1) + e;
  std::vector<double> data(static_cast<std::size_t>(k * k), 1.0 / denom);
  for (int i = 0; i < k; ++i) data[i * k + i] = e / denom;
  return Channel(k, k, std::move(data));
}

struct RowRange {
  double min = 0.0;
  double max = 0.0;
};

inline std::vector<RowRange> RowRanges(const Channel& t) {
  std::vector<RowRange> out(t.output_size());
  for (std::size_t r = 0; r < t.output_size(); ++r) {
    const auto row = t.row(r);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    out[r] = {*lo, *hi};
  }
  return out;
}

inline void CheckShape(const LpFamily& f, const Channel& t) {
  if (t.output_size() != static_cast<std::size_t>(f.l) ||
      t.input_size() != static_cast<std::size_t>(f.k)) {
    throw std::invalid_argument("family/channel shape mismatch");
  }
}

// Row max <= gamma * row min + nu for every row.
inline bool membership(const LpFamily& f, const Channel& t,
                       double tol = kMembershipTolerance) {
  CheckShape(f, t);
  const auto ranges = RowRanges(t);
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    if (ranges[r].max > f.gamma[r] * ranges[r].min + f.nu[r] + tol) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tightness.

class EntryClass {
 public:
  EntryClass(std::size_t rows, std::size_t cols)
      : cols_(cols), flags_(rows * cols, 0) {}

  bool MaxTight(std::size_t r, std::size_t c) const {
    return flags_[r * cols_ + c] & kMax;
  }
  bool MinTight(std::size_t r, std::size_t c) const {
    return flags_[r * cols_ + c] & kMin;
  }
  bool Loose(std::size_t r, std::size_t c) const {
    return flags_[r * cols_ + c] == 0;
  }
  void Mark(std::size_t r, std::size_t c, bool max_tight, bool min_tight) {
    flags_[r * cols_ + c] = static_cast<unsigned char>(
        (max_tight ? kMax : 0) | (min_tight ? kMin : 0));
  }

 private:
  static constexpr unsigned char kMax = 1;
  static constexpr unsigned char kMin = 2;
  std::size_t cols_;
  std::vector<unsigned char> flags_;
};

inline EntryClass classify_entries(const LpFamily& f, const Channel& t,
                                   double tol = kColumnTolerance) {
  CheckShape(f, t);
  const auto ranges = RowRanges(t);
  EntryClass out(t.output_size(), t.input_size());
  for (std::size_t r = 0; r < t.output_size(); ++r) {
    const bool tight =
        ranges[r].max >= f.gamma[r] * ranges[r].min + f.nu[r] - tol;
    for (std::size_t c = 0; c < t.input_size(); ++c) {
      const double v = t(r, c);
      out.Mark(r, c, tight && v >= ranges[r].max - tol,
               tight && v <= ranges[r].min + tol);
    }
  }
  return out;
}

// Entries strictly between their row's min and max.
inline std::vector<int> FreeEntriesPerColumn(const Channel& t,
                                             double tol = kColumnTolerance) {
  const auto ranges = RowRanges(t);
  std::vector<int> out(t.input_size(), 0);
  for (std::size_t c = 0; c < t.input_size(); ++c) {
    for (std::size_t r = 0; r < t.output_size(); ++r) {
      const double v = t(r, c);
      if (v > ranges[r].min + tol && v < ranges[r].max - tol) ++out[c];
    }
  }
  return out;
}

inline bool SameColumn(const Channel& t, std::size_t a, std::size_t b,
                       double tol = kColumnTolerance) {
  for (std::size_t r = 0; r < t.output_size(); ++r) {
    if (std::abs(t(r, a) - t(r, b)) > tol) return false;
  }
  return true;
}

// Inputs (in the given visiting order) whose column differs from every
// column visited before it.
inline std::vector<int> UniqueColumns(const Channel& t,
                                      const std::vector<int>& visit_order,
                                      double tol = kColumnTolerance) {
  std::vector<int> out;
  for (int c : visit_order) {
    bool fresh = true;
    for (int u : out) {
      if (SameColumn(t, c, u, tol)) {
        fresh = false;
        break;
      }
    }
    if (fresh) out.push_back(c);
  }
  return out;
}

inline std::size_t CountUniqueColumns(const Channel& t,
                                      double tol = kColumnTolerance) {
  return UniqueColumns(t, LikelihoodOrder::Identity(t.input_size()).permutation,
                       tol)
      .size();
}

// Rows r, r2 and inputs at increasing sorted positions. Entries (r, i1),
// (r, i3), (r2, i2) can move down and (r, i2), (r2, i1), (r2, i3) can move
// up without leaving the family.
struct ForbiddenPattern {
  int row = 0;
  int other_row = 0;
  std::array<int, 3> inputs{};     // original input indices
  std::array<int, 3> positions{};  // positions in the likelihood order
};

namespace detail {

inline bool CanDecrease(const EntryClass& cls, const Channel& t, int r, int c,
                        double tol) {
  return !cls.MinTight(r, c) && t(r, c) > tol;
}
inline bool CanIncrease(const EntryClass& cls, const Channel& t, int r, int c,
                        double tol) {
  return !cls.MaxTight(r, c) && t(r, c) < 1.0 - tol;
}

inline bool IsForbidden(const EntryClass& cls, const Channel& t, int r,
                        int r2, int i1, int i2, int i3, double tol) {
  return CanDecrease(cls, t, r, i1, tol) && CanDecrease(cls, t, r, i3, tol) &&
         CanDecrease(cls, t, r2, i2, tol) && CanIncrease(cls, t, r, i2, tol) &&
         CanIncrease(cls, t, r2, i1, tol) && CanIncrease(cls, t, r2, i3, tol);
}

}  // namespace detail

// Pairs consecutive unique columns (in likelihood order) and records, for
// each pair, a row where the first column is larger and a row where it is
// smaller. Two pairs sharing those rows give the pattern. Falls back to an
// exhaustive scan when the pigeonhole does not fire.
inline std::optional<ForbiddenPattern> find_forbidden(
    const LpFamily& f, const Channel& t, const LikelihoodOrder& order,
    double tol = kColumnTolerance) {
  CheckShape(f, t);
  if (order.size() != t.input_size()) {
    throw std::invalid_argument("find_forbidden: order size mismatch");
  }
  const auto cls = classify_entries(f, t, tol);
  std::vector<int> position(t.input_size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    position[order.permutation[pos]] = static_cast<int>(pos);
  }
  auto make = [&](int r, int r2, int i1, int i2, int i3) {
    return ForbiddenPattern{r,
                            r2,
                            {i1, i2, i3},
                            {position[i1], position[i2], position[i3]}};
  };

  const auto unique = UniqueColumns(t, order.permutation, tol);
  std::map<std::pair<int, int>, std::size_t> first_pair_with_rows;
  for (std::size_t a = 0; a + 1 < unique.size(); a += 2) {
    const int c = unique[a];
    const int c2 = unique[a + 1];
    int g = -1, h = -1;
    for (std::size_t r = 0; r < t.output_size(); ++r) {
      if (g < 0 && t(r, c) > t(r, c2) + tol) g = static_cast<int>(r);
      if (h < 0 && t(r, c) < t(r, c2) - tol) h = static_cast<int>(r);
    }
    if (g < 0 || h < 0) continue;
    const auto [it, inserted] = first_pair_with_rows.emplace(
        std::make_pair(g, h), a);
    if (inserted) continue;
    const int i1 = unique[it->second];
    const int i2 = unique[it->second + 1];
    const int i3 = c;
    if (detail::IsForbidden(cls, t, g, h, i1, i2, i3, tol)) {
      return make(g, h, i1, i2, i3);
    }
  }

  const int k = static_cast<int>(t.input_size());
  const int l = static_cast<int>(t.output_size());
  for (int p1 = 0; p1 < k; ++p1) {
    for (int p2 = p1 + 1; p2 < k; ++p2) {
      for (int p3 = p2 + 1; p3 < k; ++p3) {
        const int i1 = order.permutation[p1];
        const int i2 = order.permutation[p2];
        const int i3 = order.permutation[p3];
        for (int r = 0; r < l; ++r) {
          for (int r2 = 0; r2 < l; ++r2) {
            if (r != r2 &&
                detail::IsForbidden(cls, t, r, r2, i1, i2, i3, tol)) {
              return make(r, r2, i1, i2, i3);
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

// Two members of the family whose equal mixture reproduces (Tp, Tq). The
// first shifts mass between rows r and r2 on inputs i1, i2; the second on
// i2, i3 (or only on i3 when q vanishes there). Each keeps Tq fixed; their
// Tp displacements cancel. Step sizes are halved until both stay in F.
inline ExtremalityWitness forbidden_witness(const LpFamily& f,
                                            const Channel& t,
                                            const ForbiddenPattern& pattern,
                                            const Distribution& p,
                                            const Distribution& q) {
  CheckShape(f, t);
  const auto [i1, i2, i3] = pattern.inputs;
  const int r = pattern.row;
  const int r2 = pattern.other_row;
  if (!(q[i1] > 0.0 && q[i2] > 0.0)) {
    throw std::invalid_argument("forbidden_witness: q vanishes below i3");
  }
  const double x = p[i2] * q[i1] / q[i2] - p[i1];
  const bool infinite_top = q[i3] == 0.0;
  const double y = infinite_top ? p[i3] : p[i3] * q[i2] / q[i3] - p[i2];
  if (!(x > 0.0 && y > 0.0)) {
    throw std::invalid_argument(
        "forbidden_witness: likelihood ratios are not strictly increasing");
  }
  const std::size_t cols = t.input_size();
  auto add = [cols](std::vector<double>& d, int row, int col, double v) {
    d[static_cast<std::size_t>(row) * cols + col] += v;
  };

  double eps = 1.0;
  for (int attempt = 0; attempt < 200; ++attempt, eps *= 0.5) {
    const double delta = eps * q[i1] / q[i2];
    // Balance: eps * x == (second step) * y.
    const double second = eps * x / y;
    auto first_data = t.data();
    add(first_data, r, i1, -eps);
    add(first_data, r2, i1, eps);
    add(first_data, r, i2, delta);
    add(first_data, r2, i2, -delta);
    auto second_data = t.data();
    if (infinite_top) {
      add(second_data, r, i3, -second);
      add(second_data, r2, i3, second);
    } else {
      const double eps2 = second;
      const double delta2 = eps2 * q[i2] / q[i3];
      add(second_data, r, i2, eps2);
      add(second_data, r2, i2, -eps2);
      add(second_data, r, i3, -delta2);
      add(second_data, r2, i3, delta2);
    }
    auto in_range = [](const std::vector<double>& d) {
      return std::all_of(d.begin(), d.end(),
                         [](double v) { return v >= 0.0 && v <= 1.0; });
    };
    if (!in_range(first_data) || !in_range(second_data)) continue;
    Channel a(t.output_size(), cols, std::move(first_data));
    Channel b(t.output_size(), cols, std::move(second_data));
    if (membership(f, a) && membership(f, b)) return {a, b, 0.5};
  }
  throw std::runtime_error("forbidden_witness: no feasible step found");
}

// ---------------------------------------------------------------------------
// Extreme points.

class UnsupportedFamily : public std::invalid_argument {
 public:
  UnsupportedFamily()
      : std::invalid_argument("no closed-form extreme-point catalog") {}
};

// Drops channels that equal an earlier one after permuting rows (entries
// compared on a kColumnTolerance grid).
inline std::vector<Channel> DeduplicateRows(const std::vector<Channel>& in) {
  std::set<std::vector<std::vector<long long>>> seen;
  std::vector<Channel> out;
  for (const auto& t : in) {
    std::vector<std::vector<long long>> rows;
    for (std::size_t r = 0; r < t.output_size(); ++r) {
      auto& row = rows.emplace_back();
      for (double v : t.row(r)) row.push_back(std::llround(v / kColumnTolerance));
    }
    std::sort(rows.begin(), rows.end());
    if (seen.insert(std::move(rows)).second) out.push_back(t);
  }
  return out;
}

inline bool HasCatalog(const LpFamily& f) {
  return f.IsPure() && (f.l == 2 || (f.l == 3 && f.k == 3));
}

namespace detail {

// Two-row channel over k inputs: bit c of `mask` clear puts (a, 1 - a) in
// column c, set puts (1 - a, a).
inline std::vector<std::vector<double>> TwoTypeRows(int k, unsigned mask,
                                                    double a) {
  std::vector<std::vector<double>> rows(2, std::vector<double>(k));
  for (int c = 0; c < k; ++c) {
    const bool flipped = (mask >> c) & 1u;
    rows[0][c] = flipped ? 1.0 - a : a;
    rows[1][c] = flipped ? a : 1.0 - a;
  }
  return rows;
}

}  // namespace detail

// Closed-form extreme points of pure-LDP families with two outputs (any k)
// or three outputs over three inputs. Includes the constant channels and
// every row permutation unless `dedupe_rows` is set.
inline std::vector<Channel> extreme_points_catalog(const LpFamily& f,
                                                   bool dedupe_rows = false) {
  f.Validate();
  if (!HasCatalog(f)) throw UnsupportedFamily();
  const double e = f.gamma.front();
  const int k = f.k;
  std::vector<Channel> out;
  for (int r = 0; r < f.l; ++r) out.push_back(Channel::Constant(f.l, k, r));

  const double a = e / (1.0 + e);
  if (f.l == 2) {
    if (k > 30) throw std::length_error("catalog: k too large");
    for (unsigned mask = 1; mask + 1 < (1u << k); ++mask) {
      out.push_back(Channel::FromRows(detail::TwoTypeRows(k, mask, a)));
    }
  } else {
    for (int r0 = 0; r0 < 3; ++r0) {
      for (int r1 = r0 + 1; r1 < 3; ++r1) {
        for (unsigned mask = 1; mask + 1 < (1u << k); ++mask) {
          const auto two = detail::TwoTypeRows(k, mask, a);
          std::vector<std::vector<double>> rows(3, std::vector<double>(k, 0.0));
          rows[r0] = two[0];
          rows[r1] = two[1];
          out.push_back(Channel::FromRows(rows));
        }
      }
    }
    // Diagonal heavy (randomized response) and diagonal light.
    for (double off : {1.0 / (2.0 + e), e / (1.0 + 2.0 * e)}) {
      std::array<int, 3> perm{0, 1, 2};
      do {
        std::vector<std::vector<double>> rows(3, std::vector<double>(3, off));
        for (int c = 0; c < 3; ++c) rows[perm[c]][c] = 1.0 - 2.0 * off;
        out.push_back(Channel::FromRows(rows));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  return dedupe_rows ? DeduplicateRows(out) : out;
}

inline constexpr int kVertexEnumerationCap = 20;

namespace detail {

inline constexpr std::size_t kMaxConstraints = 512;
using ActiveSet = std::bitset<kMaxConstraints>;

struct Halfspace {
  std::vector<double> normal;  // normal . x <= offset
  double offset = 0.0;
};

struct Vertex {
  std::vector<double> x;
  ActiveSet active;
};

// The family in coordinates x(j, i) = T(j, i) for j < l - 1; the last row
// is 1 - sum_j x(j, i). Base constraints (non-negativity of every entry)
// come first, then the privacy inequalities.
inline std::vector<Halfspace> FamilyHalfspaces(const LpFamily& f,
                                               std::size_t* base_count) {
  const int k = f.k;
  const int d = (f.l - 1) * k;
  auto var = [k](int j, int i) { return j * k + i; };
  std::vector<Halfspace> out;
  for (int j = 0; j + 1 < f.l; ++j) {
    for (int i = 0; i < k; ++i) {
      Halfspace h{std::vector<double>(d, 0.0), 0.0};
      h.normal[var(j, i)] = -1.0;
      out.push_back(std::move(h));
    }
  }
  for (int i = 0; i < k; ++i) {
    Halfspace h{std::vector<double>(d, 0.0), 1.0};
    for (int j = 0; j + 1 < f.l; ++j) h.normal[var(j, i)] = 1.0;
    out.push_back(std::move(h));
  }
  *base_count = out.size();
  for (int j = 0; j < f.l; ++j) {
    const double g = f.gamma[j];
    for (int i = 0; i < k; ++i) {
      for (int i2 = 0; i2 < k; ++i2) {
        if (i == i2) continue;
        Halfspace h{std::vector<double>(d, 0.0), f.nu[j]};
        if (j + 1 < f.l) {
          h.normal[var(j, i)] = 1.0;
          h.normal[var(j, i2)] = -g;
        } else {
          // 1 - s_i - g (1 - s_i2) <= nu with s = column sum of x.
          for (int jj = 0; jj + 1 < f.l; ++jj) {
            h.normal[var(jj, i)] = -1.0;
            h.normal[var(jj, i2)] = g;
          }
          h.offset = f.nu[j] - 1.0 + g;
        }
        out.push_back(std::move(h));
      }
    }
  }
  for (auto& h : out) {
    double scale = 0.0;
    for (double v : h.normal) scale = std::max(scale, std::abs(v));
    if (scale > 0.0) {
      for (double& v : h.normal) v /= scale;
      h.offset /= scale;
    }
  }
  return out;
}

inline double Slack(const Halfspace& h, const std::vector<double>& x) {
  double s = h.offset;
  for (std::size_t i = 0; i < x.size(); ++i) s -= h.normal[i] * x[i];
  return s;
}

inline int RankOf(const std::vector<Halfspace>& hs, const ActiveSet& rows,
                  int d) {
  const auto count = static_cast<Eigen::Index>(rows.count());
  Eigen::MatrixXd m(count, d);
  Eigen::Index at = 0;
  for (std::size_t c = 0; c < hs.size(); ++c) {
    if (!rows.test(c)) continue;
    for (int i = 0; i < d; ++i) m(at, i) = hs[c].normal[i];
    ++at;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

// Incremental cutting: starts from the l^k deterministic channels (the
// vertices of the product of simplices) and intersects with one privacy
// halfspace at a time. New vertices appear on edges joining a kept vertex
// to a removed one; adjacency is the rank test on shared active sets.
inline std::vector<Channel> EnumerateVertices(const LpFamily& f) {
  const int k = f.k;
  const int l = f.l;
  if (l == 1) return {Channel::Constant(1, k)};
  const int d = (l - 1) * k;
  std::size_t base = 0;
  const auto hs = FamilyHalfspaces(f, &base);
  if (hs.size() > kMaxConstraints) {
    throw std::length_error("vertex enumeration: too many constraints");
  }
  constexpr double kTol = 1e-9;

  std::vector<Vertex> verts;
  std::vector<int> labels(k, 0);
  while (true) {
    Vertex v{std::vector<double>(d, 0.0), {}};
    for (int i = 0; i < k; ++i) {
      if (labels[i] + 1 < l) v.x[labels[i] * k + i] = 1.0;
    }
    for (std::size_t c = 0; c < base; ++c) {
      if (std::abs(Slack(hs[c], v.x)) <= kTol) v.active.set(c);
    }
    verts.push_back(std::move(v));
    int i = 0;
    while (i < k && labels[i] == l - 1) labels[i++] = 0;
    if (i == k) break;
    ++labels[i];
  }

  for (std::size_t c = base; c < hs.size(); ++c) {
    std::vector<double> slack(verts.size());
    std::vector<std::size_t> inside, outside;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      slack[v] = Slack(hs[c], verts[v].x);
      if (slack[v] > kTol) {
        inside.push_back(v);
      } else if (slack[v] < -kTol) {
        outside.push_back(v);
      } else {
        verts[v].active.set(c);
      }
    }
    if (outside.empty()) continue;
    std::vector<Vertex> next;
    for (std::size_t u : inside) {
      for (std::size_t w : outside) {
        const ActiveSet common = verts[u].active & verts[w].active;
        if (static_cast<int>(common.count()) < d - 1) continue;
        if (RankOf(hs, common, d) != d - 1) continue;
        const double t = slack[u] / (slack[u] - slack[w]);
        Vertex nv{std::vector<double>(d), common};
        for (int i = 0; i < d; ++i) {
          nv.x[i] = verts[u].x[i] + t * (verts[w].x[i] - verts[u].x[i]);
        }
        nv.active.set(c);
        next.push_back(std::move(nv));
      }
    }
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (slack[v] >= -kTol) next.push_back(std::move(verts[v]));
    }
    verts = std::move(next);
  }

  std::set<std::vector<long long>> seen;
  std::vector<Channel> out;
  for (const auto& v : verts) {
    std::vector<double> data(static_cast<std::size_t>(l * k));
    for (int i = 0; i < k; ++i) {
      double rest = 1.0;
      for (int j = 0; j + 1 < l; ++j) {
        const double e = std::clamp(v.x[j * k + i], 0.0, 1.0);
        data[j * k + i] = e;
        rest -= e;
      }
      data[(l - 1) * k + i] = std::max(0.0, rest);
    }
    std::vector<long long> key(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      key[i] = std::llround(data[i] * 1e8);
    }
    if (!seen.insert(std::move(key)).second) continue;
    // Renormalize each column so the stored channel is exact.
    for (int i = 0; i < k; ++i) {
      double sum = 0.0;
      for (int j = 0; j < l; ++j) sum += data[j * k + i];
      for (int j = 0; j < l; ++j) data[j * k + i] /= sum;
    }
    out.emplace_back(l, k, std::move(data));
  }
  std::sort(out.begin(), out.end(), [](const Channel& a, const Channel& b) {
    return a.data() < b.data();
  });
  return out;
}

}  // namespace detail

// All vertices of the family's polytope, for l * k <= kVertexEnumerationCap.
// Results are cached per family.
inline std::vector<Channel> vertex_enumeration(const LpFamily& f) {
  f.Validate();
  if (f.l * f.k > kVertexEnumerationCap) {
    throw std::length_error("vertex enumeration cap exceeded: l*k = " +
                            std::to_string(f.l * f.k) + " > " +
                            std::to_string(kVertexEnumerationCap));
  }
  static std::mutex mu;
  static std::map<std::tuple<std::vector<double>, std::vector<double>, int,
                             int>,
                  std::vector<Channel>>
      cache;
  const auto key = std::make_tuple(f.gamma, f.nu, f.k, f.l);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto verts = detail::EnumerateVertices(f);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(verts)).first->second;
}

// Catalog when one exists, vertex enumeration otherwise.
inline std::vector<Channel> ExtremePoints(const LpFamily& f,
                                          bool dedupe_rows = false) {
  if (HasCatalog(f)) return extreme_points_catalog(f, dedupe_rows);
  auto verts = vertex_enumeration(f);
  return dedupe_rows ? DeduplicateRows(verts) : verts;
}

// ---------------------------------------------------------------------------
// Renyi differential privacy.

// Channels whose output distributions for any two inputs are within Renyi
// divergence eps of order alpha, in both directions.
struct RdpBinaryConstraint {
  double eps = 0.0;
  double alpha = 2.0;

  bool PairFeasible(std::span<const double> a, std::span<const double> b,
                    double tol = kMembershipTolerance) const {
    return renyi(a, b, alpha) <= eps + tol && renyi(b, a, alpha) <= eps + tol;
  }

  // Binary-output case: columns Ber(x) and Ber(y).
  bool Feasible(double x, double y, double tol = kMembershipTolerance) const {
    const std::array<double, 2> a{x, 1.0 - x};
    const std::array<double, 2> b{y, 1.0 - y};
    return PairFeasible(a, b, tol);
  }

  bool Contains(const Channel& t, double tol = kMembershipTolerance) const {
    for (std::size_t c = 0; c < t.input_size(); ++c) {
      const auto a = t.column(c);
      for (std::size_t c2 = c + 1; c2 < t.input_size(); ++c2) {
        if (!PairFeasible(a, t.column(c2), tol)) return false;
      }
    }
    return true;
  }
};

inline RdpBinaryConstraint rdp_binary_family(double eps, double alpha) {
  if (!(eps >= 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("rdp: need eps >= 0 and alpha > 0");
  }
  return {eps, alpha};
}

}  // namespace ldpopt
