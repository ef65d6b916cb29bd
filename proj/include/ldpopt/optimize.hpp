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

// Maximization of quasi-convex, relabeling-invariant objectives g(Tp, Tq)
// over channel sets:
//  * maximize_comm: all channels with l outputs; the optimum sits on a
//    threshold channel.
//  * maximize_private: an LpFamily with l outputs; the optimum factors as an
//    extreme point of F(l, 2 l^2) after a threshold channel into 2 l^2
//    outputs.
//  * rdp_binary_optimize: binary-output Renyi-private channels.
// oracle_random_search gives lower bounds for cross-checking all three.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <locale>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ldpopt/core.hpp"
#include "ldpopt/ldp.hpp"
#include "ldpopt/parallel.hpp"
#include "ldpopt/rng.hpp"
#include "ldpopt/threshold.hpp"

namespace ldpopt {

struct Objective {
  enum class Kind { kHellingerSq, kTv, kKl, kRenyi, kChernoff };
  Kind kind = Kind::kHellingerSq;
  double alpha = 2.0;  // renyi order

  static Objective HellingerSq() { return {Kind::kHellingerSq, 2.0}; }
  static Objective Tv() { return {Kind::kTv, 2.0}; }
  static Objective Kl() { return {Kind::kKl, 2.0}; }
  static Objective Renyi(double alpha) { return {Kind::kRenyi, alpha}; }
  static Objective Chernoff() { return {Kind::kChernoff, 2.0}; }

  // Accepts hellinger_sq (or hellinger), tv, kl, chernoff, renyi:<alpha>.
  static Objective Parse(const std::string& name) {
    if (name == "hellinger_sq" || name == "hellinger") return HellingerSq();
    if (name == "tv") return Tv();
    if (name == "kl") return Kl();
    if (name == "chernoff") return Chernoff();
    if (name.rfind("renyi:", 0) == 0) {
      const std::string order = name.substr(6);
      if (order == "inf") return Renyi(kInfinity);
      std::size_t used = 0;
      double alpha = 0.0;
      try {
        alpha = std::stod(order, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != order.size() || !(alpha > 0.0)) {
        throw std::invalid_argument("objective: bad renyi order '" + order +
                                    "'");
      }
      return Renyi(alpha);
    }
    throw std::invalid_argument("objective: unknown name '" + name + "'");
  }

  std::string Name() const {
    switch (kind) {
      case Kind::kHellingerSq:
        return "hellinger_sq";
      case Kind::kTv:
        return "tv";
      case Kind::kKl:
        return "kl";
      case Kind::kChernoff:
        return "chernoff";
      case Kind::kRenyi:
        break;
    }
    if (std::isinf(alpha)) return "renyi:inf";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "renyi:" << alpha;
    return os.str();
  }

  double operator()(std::span<const double> tp,
                    std::span<const double> tq) const {
    switch (kind) {
      case Kind::kHellingerSq:
        return hellinger_sq(tp, tq);
      case Kind::kTv:
        return tv(tp, tq);
      case Kind::kKl:
        return kl(tp, tq);
      case Kind::kRenyi:
        return renyi(tp, tq, alpha);
      case Kind::kChernoff:
        return chernoff_info(tp, tq);
    }
    return 0.0;
  }

  double Evaluate(const Channel& t, const Distribution& p,
                  const Distribution& q) const {
    return (*this)(apply(t, p).probs(), apply(t, q).probs());
  }
};

// How a returned channel factors: outer x inner, with inner a threshold
// channel (lifted to the original alphabet) and outer either the identity
// (pure communication constraint) or an extreme point of the privacy family.
struct Certificate {
  enum class Kind { kThreshold, kDecomposition };
  Kind kind = Kind::kThreshold;
  std::vector<int> cuts;      // threshold cuts on the canonical alphabet
  std::size_t outer_index = 0;  // position in the extreme-point list
  Channel inner;
  Channel outer;

  Channel Recompose() const { return compose(outer, inner); }

  std::string Describe() const {
    std::string out = kind == Kind::kThreshold ? "threshold(" : "decomposition(";
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      out += (i ? " " : "") + std::to_string(cuts[i]);
    }
    out += ")";
    if (kind == Kind::kDecomposition) {
      out += "+extreme#" + std::to_string(outer_index);
    }
    return out;
  }
};

struct OptResult {
  Channel channel;
  double value = 0.0;
  Certificate certificate;
};

namespace detail {

// Block sums of a canonical (already ratio-sorted) distribution.
inline void ThresholdImage(std::span<const double> probs,
                           const std::vector<int>& cuts,
                           std::span<double> out) {
  std::size_t pos = 0;
  for (std::size_t b = 0; b < out.size(); ++b) {
    const std::size_t end =
        b < cuts.size() ? static_cast<std::size_t>(cuts[b]) : probs.size();
    double acc = 0.0;
    for (; pos < end; ++pos) acc += probs[pos];
    out[b] = acc;
  }
}

inline Channel IdentityOrder(const PairCanonicalization& canon,
                             const std::vector<int>& cuts) {
  return CanonicalPartition(cuts).ToChannel(
      LikelihoodOrder::Identity(canon.size()));
}

}  // namespace detail

// Exact maximum of g over channels with l outputs. Ties go to the
// lexicographically smallest cut vector.
inline OptResult maximize_comm(const Distribution& p, const Distribution& q,
                               int l, const Objective& g) {
  if (l < 1) throw std::invalid_argument("maximize_comm: l >= 1");
  const auto canon = canonicalize(p, q);
  const int kc = static_cast<int>(canon.size());
  const auto cut_list = ThresholdCutList(kc, l);
  double value = 0.0;
  const std::size_t best = ParallelArgMax(
      cut_list.size(),
      [&](std::size_t i) {
        std::vector<double> a(l), b(l);
        detail::ThresholdImage(canon.p.probs(), cut_list[i], a);
        detail::ThresholdImage(canon.q.probs(), cut_list[i], b);
        return g(a, b);
      },
      &value);
  Certificate cert;
  cert.kind = Certificate::Kind::kThreshold;
  cert.cuts = cut_list[best];
  cert.inner = canon.Lift(detail::IdentityOrder(canon, cert.cuts));
  cert.outer = Channel::Identity(l);
  OptResult out;
  out.channel = cert.Recompose();
  out.value = g.Evaluate(out.channel, p, q);
  out.certificate = std::move(cert);
  return out;
}

// Candidate outer channels for maximize_private over F(l, inner_outputs).
inline std::vector<Channel> DecompositionOuterChannels(const LpFamily& f,
                                                       int inner_outputs) {
  const auto sub = f.WithInputs(inner_outputs);
  // Shipped objectives ignore output labels, so row permutations are
  // redundant.
  return ExtremePoints(sub, /*dedupe_rows=*/true);
}

// Maximum of g over F(l, k) via outer x threshold with the threshold into
// min(k', 2 l^2) outputs (k' = canonical alphabet size). Ties go to the
// smallest (cut vector, extreme point) pair.
inline OptResult maximize_private(const Distribution& p, const Distribution& q,
                                  const LpFamily& f, const Objective& g) {
  f.Validate();
  if (static_cast<std::size_t>(f.k) != p.size()) {
    throw std::invalid_argument("maximize_private: family k != alphabet size");
  }
  const auto canon = canonicalize(p, q);
  const int kc = static_cast<int>(canon.size());
  const int inner = std::min(kc, 2 * f.l * f.l);
  const auto outers = DecompositionOuterChannels(f, inner);
  const auto cut_list = ThresholdCutList(kc, inner);
  const std::size_t per_cut = outers.size();

  // Per cut: best outer. Then argmax across cuts.
  std::vector<double> cut_value(cut_list.size());
  std::vector<std::size_t> cut_outer(cut_list.size());
  ParallelFor(cut_list.size(), [&](std::size_t i) {
    std::vector<double> a(inner), b(inner);
    detail::ThresholdImage(canon.p.probs(), cut_list[i], a);
    detail::ThresholdImage(canon.q.probs(), cut_list[i], b);
    std::vector<double> ta(f.l), tb(f.l);
    double best = 0.0;
    std::size_t arg = per_cut;
    for (std::size_t o = 0; o < per_cut; ++o) {
      detail::ApplyInto(outers[o], a, ta);
      detail::ApplyInto(outers[o], b, tb);
      const double v = g(ta, tb);
      if (arg == per_cut || v > best) {
        best = v;
        arg = o;
      }
    }
    cut_value[i] = best;
    cut_outer[i] = arg;
  });
  std::size_t best_cut = 0;
  for (std::size_t i = 1; i < cut_list.size(); ++i) {
    if (cut_value[i] > cut_value[best_cut]) best_cut = i;
  }

  Certificate cert;
  cert.kind = Certificate::Kind::kDecomposition;
  cert.cuts = cut_list[best_cut];
  cert.outer_index = cut_outer[best_cut];
  cert.inner = canon.Lift(detail::IdentityOrder(canon, cert.cuts));
  cert.outer = outers[cert.outer_index];
  OptResult out;
  out.channel = cert.Recompose();
  out.value = g.Evaluate(out.channel, p, q);
  out.certificate = std::move(cert);
  return out;
}

// ---------------------------------------------------------------------------
// Random-search oracle.

// All channels with `l` outputs.
struct CommConstraint {
  int l = 2;
};

using SearchConstraint =
    std::variant<CommConstraint, LpFamily, RdpBinaryConstraint>;

namespace detail {

inline int OutputsOf(const SearchConstraint& c) {
  if (const auto* comm = std::get_if<CommConstraint>(&c)) return comm->l;
  if (const auto* fam = std::get_if<LpFamily>(&c)) return fam->l;
  return 2;
}

inline bool Feasible(const SearchConstraint& c, const Channel& t) {
  if (std::holds_alternative<CommConstraint>(c)) return true;
  if (const auto* fam = std::get_if<LpFamily>(&c)) return membership(*fam, t);
  return std::get<RdpBinaryConstraint>(c).Contains(t);
}

// Random column-stochastic matrix: each column is a point mass, a flat
// Dirichlet draw, or a sparse Dirichlet draw.
inline std::vector<double> RandomColumns(std::size_t l, std::size_t k,
                                         Philox& rng) {
  std::vector<double> data(l * k, 0.0);
  std::exponential_distribution<double> expo(1.0);
  const double style = rng.Uniform();
  for (std::size_t c = 0; c < k; ++c) {
    if (style < 0.35) {
      const auto r = static_cast<std::size_t>(rng.Uniform() * l) % l;
      data[r * k + c] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < l; ++r) {
      double w = expo(rng);
      if (style > 0.7) w = std::pow(w, 4.0);
      data[r * k + c] = w;
      sum += w;
    }
    for (std::size_t r = 0; r < l; ++r) data[r * k + c] /= sum;
  }
  return data;
}

// Largest lambda in [0, 1] such that lambda T + (1 - lambda) U stays in the
// family, U being the all-1/l channel. Each row constraint is linear in
// lambda.
inline double ContractionFactor(const LpFamily& f, const Channel& t) {
  const auto ranges = RowRanges(t);
  const double u = 1.0 / f.l;
  double lambda = 1.0;
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    const double at0 = u * (1.0 - f.gamma[r]) - f.nu[r];
    const double at1 =
        ranges[r].max - f.gamma[r] * ranges[r].min - f.nu[r];
    if (at1 <= 0.0) continue;
    lambda = std::min(lambda, -at0 / (at1 - at0));
  }
  return std::clamp(lambda, 0.0, 1.0);
}

inline Channel Mix(const Channel& t, double lambda) {
  const double u = 1.0 / static_cast<double>(t.output_size());
  std::vector<double> data = t.data();
  for (double& v : data) v = lambda * v + (1.0 - lambda) * u;
  return Channel(t.output_size(), t.input_size(), std::move(data));
}

inline Channel RandomFeasible(const SearchConstraint& c, std::size_t k,
                              Philox& rng) {
  const auto l = static_cast<std::size_t>(OutputsOf(c));
  Channel t(l, k, RandomColumns(l, k, rng));
  if (std::holds_alternative<CommConstraint>(c)) return t;
  if (const auto* fam = std::get_if<LpFamily>(&c)) {
    // Shrink slightly below the boundary factor so rounding stays inside.
    Channel out = Mix(t, ContractionFactor(*fam, t) * (1.0 - 1e-12));
    return membership(*fam, out) ? out : Mix(t, 0.0);
  }
  const auto& rdp = std::get<RdpBinaryConstraint>(c);
  if (rdp.Contains(t)) return t;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rdp.Contains(Mix(t, mid)) ? lo : hi) = mid;
  }
  return Mix(t, lo);
}

// Row-wise clamp to [m_j, gamma_j m_j + nu_j], then column renormalization.
inline std::vector<double> ProjectRows(const LpFamily& f,
                                       std::vector<double> data,
                                       std::size_t l, std::size_t k) {
  for (std::size_t r = 0; r < l; ++r) {
    double lo = 1.0;
    for (std::size_t c = 0; c < k; ++c) lo = std::min(lo, data[r * k + c]);
    const double hi = f.gamma[r] * lo + f.nu[r];
    for (std::size_t c = 0; c < k; ++c) {
      data[r * k + c] = std::clamp(data[r * k + c], lo, hi);
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < l; ++r) sum += data[r * k + c];
    for (std::size_t r = 0; r < l; ++r) data[r * k + c] /= sum;
  }
  return data;
}

}  // namespace detail

inline constexpr int kRefinementIterations = 200;

// Best objective over `trials` random feasible channels, then coordinate
// hill-climbing from the best one (mass moves within a column, projected
// back onto the family when needed). A lower bound on the true maximum;
// returns -inf when trials == 0.
inline double oracle_random_search(const Distribution& p,
                                   const Distribution& q,
                                   const SearchConstraint& constraint,
                                   const Objective& g, int trials,
                                   std::uint64_t seed) {
  if (trials <= 0) return -kInfinity;
  const std::size_t k = p.size();
  const auto l = static_cast<std::size_t>(detail::OutputsOf(constraint));
  std::vector<double> values(static_cast<std::size_t>(trials));
  ParallelFor(values.size(), [&](std::size_t i) {
    Philox rng = Philox::ForTrial(seed, i);
    values[i] = g.Evaluate(detail::RandomFeasible(constraint, k, rng), p, q);
  });
  const auto best_index = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  Philox rng = Philox::ForTrial(seed, best_index);
  Channel best = detail::RandomFeasible(constraint, k, rng);
  double best_value = values[best_index];

  const auto* family = std::get_if<LpFamily>(&constraint);
  double step = 0.25;
  for (int it = 0; it < kRefinementIterations; ++it) {
    bool improved = false;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t from = 0; from < l; ++from) {
        for (std::size_t to = 0; to < l; ++to) {
          if (from == to) continue;
          const double amount = std::min(step, best(from, c));
          if (amount <= 0.0) continue;
          std::vector<double> data = best.data();
          data[from * k + c] -= amount;
          data[to * k + c] += amount;
          data[from * k + c] = std::max(0.0, data[from * k + c]);
          Channel cand(l, k, data);
          if (!detail::Feasible(constraint, cand)) {
            if (family == nullptr) continue;
            cand = Channel(l, k, detail::ProjectRows(*family, data, l, k));
            if (!detail::Feasible(constraint, cand)) continue;
          }
          const double v = g.Evaluate(cand, p, q);
          if (v > best_value) {
            best_value = v;
            best = std::move(cand);
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_value;
}

// ---------------------------------------------------------------------------
// Renyi-private binary channels.

inline constexpr double kRdpGridStep = 1e-4;

// Boundary of {(x, y) : columns Ber(x), Ber(y) feasible}: for each grid x,
// the feasible y form an interval around x whose endpoints are found by
// bisection.
inline std::vector<std::array<double, 2>> RdpBoundary(
    const RdpBinaryConstraint& rdp, double grid_step = kRdpGridStep) {
  std::vector<std::array<double, 2>> out;
  const auto points = static_cast<int>(std::llround(1.0 / grid_step));
  for (int i = 0; i <= points; ++i) {
    const double x = std::min(1.0, i * grid_step);
    for (const double end : {0.0, 1.0}) {
      double inside = x, outside = end;
      if (rdp.Feasible(x, end)) {
        out.push_back({x, end});
        continue;
      }
      for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-15; ++it) {
        const double mid = 0.5 * (inside + outside);
        (rdp.Feasible(x, mid) ? inside : outside) = mid;
      }
      out.push_back({x, inside});
    }
  }
  return out;
}

// Maximum of g over binary-output Renyi-private channels: a boundary point
// of the 2x2 feasible region after each binary threshold channel.
inline OptResult rdp_binary_optimize(const Distribution& p,
                                     const Distribution& q, double eps,
                                     double alpha, const Objective& g) {
  const auto rdp = rdp_binary_family(eps, alpha);
  const auto canon = canonicalize(p, q);
  const int kc = static_cast<int>(canon.size());
  const auto boundary = RdpBoundary(rdp);
  // Binary thresholds with both labelings.
  std::vector<std::pair<std::vector<int>, bool>> inners;
  ForEachThresholdCuts(kc, 2, [&](const std::vector<int>& cuts) {
    inners.emplace_back(cuts, false);
    inners.emplace_back(cuts, true);
  });
  std::vector<double> inner_value(inners.size());
  std::vector<std::size_t> inner_arg(inners.size());
  ParallelFor(inners.size(), [&](std::size_t i) {
    std::array<double, 2> a{}, b{};
    detail::ThresholdImage(canon.p.probs(), inners[i].first, a);
    detail::ThresholdImage(canon.q.probs(), inners[i].first, b);
    if (inners[i].second) {
      std::swap(a[0], a[1]);
      std::swap(b[0], b[1]);
    }
    double best = 0.0;
    std::size_t arg = boundary.size();
    for (std::size_t j = 0; j < boundary.size(); ++j) {
      const auto [x, y] = boundary[j];
      const std::array<double, 2> ta{x * a[0] + y * a[1],
                                     (1 - x) * a[0] + (1 - y) * a[1]};
      const std::array<double, 2> tb{x * b[0] + y * b[1],
                                     (1 - x) * b[0] + (1 - y) * b[1]};
      const double v = g(ta, tb);
      if (arg == boundary.size() || v > best) {
        best = v;
        arg = j;
      }
    }
    inner_value[i] = best;
    inner_arg[i] = arg;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < inners.size(); ++i) {
    if (inner_value[i] > inner_value[best]) best = i;
  }
  const auto [x, y] = boundary[inner_arg[best]];
  Certificate cert;
  cert.kind = Certificate::Kind::kDecomposition;
  cert.cuts = inners[best].first;
  cert.outer_index = inner_arg[best];
  ThresholdPartition part = CanonicalPartition(cert.cuts);
  if (inners[best].second) part.labeling = {1, 0};
  cert.inner =
      canon.Lift(part.ToChannel(LikelihoodOrder::Identity(canon.size())));
  cert.outer = Channel::FromRows({{x, y}, {1.0 - x, 1.0 - y}});
  OptResult out;
  out.channel = cert.Recompose();
  out.value = g.Evaluate(out.channel, p, q);
  out.certificate = std::move(cert);
  return out;
}

}  // namespace ldpopt
