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

// Explicit channels and distribution pairs: binary randomized response,
// pairs with prescribed Hellinger and TV distance, the binary-output minimax
// channel, the reduce-then-randomize low-privacy channel, the approximate-LDP
// leak channel, and sample-complexity curves n(eps) = 1 / max d_h^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldpopt/core.hpp"
#include "ldpopt/ldp.hpp"
#include "ldpopt/optimize.hpp"
#include "ldpopt/parallel.hpp"
#include "ldpopt/threshold.hpp"

namespace ldpopt {

inline constexpr int kBisectionIterations = 200;
inline constexpr double kBisectionTolerance = 1e-12;

// Root of an increasing f on [lo, hi] with f(lo) <= 0 <= f(hi).
inline double BisectIncreasing(const std::function<double(double)>& f,
                               double lo, double hi) {
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < kBisectionIterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v) <= kBisectionTolerance) break;
    (v < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 0.0) break;
  }
  return mid;
}

struct SdpiResult {
  Channel channel;
  double hellinger_sq = 0.0;
  double tv = 0.0;  // d_TV(RR p, RR q) evaluated directly
  double tv_identity = 0.0;  // d_TV(p, q) (e^eps - 1) / (e^eps + 1)
};

// Binary randomized response applied to a binary pair.
inline SdpiResult sdpi_binary(const Distribution& p, const Distribution& q,
                              double eps) {
  if (p.size() != 2 || q.size() != 2) {
    throw std::invalid_argument("sdpi_binary: binary pair required");
  }
  SdpiResult out;
  out.channel = randomized_response(2, eps);
  const auto rp = apply(out.channel, p);
  const auto rq = apply(out.channel, q);
  out.hellinger_sq = hellinger_sq(rp, rq);
  out.tv = tv(rp, rq);
  const double e = ExpEps(eps);
  out.tv_identity = tv(p, q) * ((e - 1.0) / (e + 1.0));
  return out;
}

struct DistributionPair {
  Distribution p;
  Distribution q;
};

// p = (0, 1/2, 1/2), q = (2y, 1/2 + nu - 2y, 1/2 - nu) with y chosen so that
// d_h^2 = rho; d_TV = nu for every y in [0, nu / 2].
inline DistributionPair worst_case_pair(double rho, double nu) {
  if (!(nu > 0.0 && nu < 0.5 && rho >= 2.0 * nu * nu && rho <= nu)) {
    throw std::invalid_argument(
        "worst_case_pair: need 0 < nu < 1/2 and 2 nu^2 <= rho <= nu");
  }
  const double half = 0.5;
  auto hel = [&](double y) {
    return HellingerTerm(0.0, 2.0 * y) +
           HellingerTerm(half, half + nu - 2.0 * y) +
           HellingerTerm(half, half - nu);
  };
  const double y = BisectIncreasing(
      [&](double v) { return hel(v) - rho; }, 0.0, nu / 2.0);
  return {Distribution({0.0, half, half}),
          Distribution({2.0 * y, half + nu - 2.0 * y, half - nu})};
}

// Ber(a + nu) against Ber(a), with a in [0, (1 - nu) / 2] picked so that
// d_h^2 = rho. Needs d_h^2 of the symmetric pair <= rho <= d_h^2 at a = 0.
inline DistributionPair binary_pair(double rho, double nu) {
  if (!(nu > 0.0 && nu < 1.0 && rho > 0.0)) {
    throw std::invalid_argument("binary_pair: need 0 < nu < 1, rho > 0");
  }
  auto hel = [&](double a) {
    return HellingerTerm(a + nu, a) + HellingerTerm(1.0 - a - nu, 1.0 - a);
  };
  const double top = 0.5 * (1.0 - nu);
  if (rho > hel(0.0) || rho < hel(top)) {
    throw std::invalid_argument("binary_pair: rho outside the range [" +
                                std::to_string(hel(top)) + ", " +
                                std::to_string(hel(0.0)) + "] for this nu");
  }
  // hel decreases in a.
  const double a = BisectIncreasing(
      [&](double v) { return rho - hel(v); }, 0.0, top);
  return {Distribution::Bernoulli(a + nu), Distribution::Bernoulli(a)};
}

namespace detail {

// Every binary threshold channel on the canonical alphabet, lifted.
inline std::vector<Channel> BinaryThresholds(const PairCanonicalization& c) {
  std::vector<Channel> out;
  ForEachThresholdCuts(static_cast<int>(c.size()), 2,
                       [&](const std::vector<int>& cuts) {
                         out.push_back(c.Lift(CanonicalPartition(cuts).ToChannel(
                             LikelihoodOrder::Identity(c.size()))));
                       });
  return out;
}

inline std::size_t ArgMaxOver(const std::vector<Channel>& ts,
                              const Distribution& p, const Distribution& q,
                              const Objective& g) {
  std::size_t arg = 0;
  double best = -kInfinity;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double v = g.Evaluate(ts[i], p, q);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return arg;
}

}  // namespace detail

// Binary randomized response after a binary threshold channel. Two
// candidates: the TV-maximizing (Scheffe) threshold and the
// Hellinger-maximizing one; the one with larger output Hellinger wins.
inline Channel minimax_channel(const Distribution& p, const Distribution& q,
                               double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("minimax_channel: eps > 0");
  const auto canon = canonicalize(p, q);
  const auto thresholds = detail::BinaryThresholds(canon);
  const auto rr = randomized_response(2, eps);
  Channel best;
  double best_value = -kInfinity;
  for (const auto& g : {Objective::Tv(), Objective::HellingerSq()}) {
    const auto cand =
        compose(rr, thresholds[detail::ArgMaxOver(thresholds, p, q, g)]);
    const double v = Objective::HellingerSq().Evaluate(cand, p, q);
    if (v > best_value) {
      best_value = v;
      best = cand;
    }
  }
  return best;
}

// Elements with likelihood ratio in [1/2, 1) (below) and [1, 2] (above) and
// their Hellinger contribution.
struct ComparableSplit {
  std::vector<int> below;
  std::vector<int> above;
  double contribution = 0.0;
};

inline ComparableSplit SplitComparable(const Distribution& p,
                                       const Distribution& q) {
  ComparableSplit out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] <= 0.0) continue;
    const double ratio = p[i] / q[i];
    if (ratio >= 0.5 && ratio < 1.0) {
      out.below.push_back(static_cast<int>(i));
    } else if (ratio >= 1.0 && ratio <= 2.0) {
      out.above.push_back(static_cast<int>(i));
    } else {
      continue;
    }
    out.contribution += HellingerTerm(p[i], q[i]);
  }
  return out;
}

struct Reduction {
  enum class Branch { kIdentity, kBinary, kBuckets };
  Channel channel;
  Branch branch = Branch::kIdentity;
  double retained = 0.0;  // d_h^2 of the reduced pair
};

inline std::string BranchName(Reduction::Branch b) {
  switch (b) {
    case Reduction::Branch::kIdentity:
      return "identity";
    case Reduction::Branch::kBinary:
      return "binary";
    case Reduction::Branch::kBuckets:
      return "buckets";
  }
  return "";
}

namespace detail {

// Comparable elements grouped by sign of delta_i = p_i/q_i - 1 and dyadic
// range of |delta_i|; the l - 1 groups with the most sum q_i delta_i^2 get
// their own outputs, everything else shares output l - 1.
inline std::vector<int> DyadicBuckets(const Distribution& p,
                                      const Distribution& q,
                                      const ComparableSplit& split, int l) {
  std::map<std::pair<int, int>, std::pair<double, std::vector<int>>> groups;
  auto add = [&](int i, int side) {
    const double delta = std::abs(p[i] - q[i]) / q[i];
    if (delta == 0.0) return;
    const int level =
        std::max(0, static_cast<int>(std::floor(-std::log2(delta))));
    auto& g = groups[{side, level}];
    g.first += q[i] * delta * delta;
    g.second.push_back(i);
  };
  for (int i : split.below) add(i, 0);
  for (int i : split.above) add(i, 1);
  std::vector<std::pair<double, std::vector<int>>> ranked;
  for (auto& [key, g] : groups) ranked.push_back(std::move(g));
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> labels(p.size(), l - 1);
  for (std::size_t g = 0;
       g < ranked.size() && g + 1 < static_cast<std::size_t>(l); ++g) {
    for (int i : ranked[g].second) labels[i] = static_cast<int>(g);
  }
  return labels;
}

// Comparable elements sorted by likelihood ratio and cut into at most l - 1
// contiguous runs (elements between runs may be skipped) maximizing the sum
// of the runs' Hellinger terms; O(l m^2) dynamic program over the m
// comparable elements. Skipped and non-comparable elements share output
// l - 1.
inline std::vector<int> ContiguousBuckets(const Distribution& p,
                                          const Distribution& q,
                                          const ComparableSplit& split,
                                          int l) {
  std::vector<int> items = split.below;
  items.insert(items.end(), split.above.begin(), split.above.end());
  std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
    return p[a] * q[b] < p[b] * q[a];
  });
  const std::size_t m = items.size();
  const int runs = l - 1;
  std::vector<double> pre_p(m + 1, 0.0), pre_q(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    pre_p[i + 1] = pre_p[i] + p[items[i]];
    pre_q[i + 1] = pre_q[i] + q[items[i]];
  }
  auto run_value = [&](std::size_t a, std::size_t b) {  // items [a, b)
    return HellingerTerm(pre_p[b] - pre_p[a], pre_q[b] - pre_q[a]);
  };
  // best[g][i]: first i items decided, g runs used. from: (start, kind).
  constexpr double kUnset = -1.0;
  std::vector<std::vector<double>> best(runs + 1,
                                        std::vector<double>(m + 1, kUnset));
  std::vector<std::vector<std::size_t>> start(
      runs + 1, std::vector<std::size_t>(m + 1, 0));
  std::vector<std::vector<bool>> skipped(runs + 1,
                                         std::vector<bool>(m + 1, false));
  best[0][0] = 0.0;
  for (int g = 0; g <= runs; ++g) {
    for (std::size_t i = 0; i <= m; ++i) {
      if (i > 0 && best[g][i - 1] > best[g][i]) {
        best[g][i] = best[g][i - 1];
        skipped[g][i] = true;
      }
      if (g == 0 || i == 0) continue;
      for (std::size_t a = 0; a < i; ++a) {
        if (best[g - 1][a] < 0.0) continue;
        const double v = best[g - 1][a] + run_value(a, i);
        if (v > best[g][i]) {
          best[g][i] = v;
          start[g][i] = a;
          skipped[g][i] = false;
        }
      }
    }
  }
  int g = 0;
  for (int h = 1; h <= runs; ++h) {
    if (best[h][m] > best[g][m]) g = h;
  }
  std::vector<int> labels(p.size(), l - 1);
  std::size_t i = m;
  while (i > 0 && g > 0) {
    if (skipped[g][i]) {
      --i;
      continue;
    }
    const std::size_t a = start[g][i];
    for (std::size_t j = a; j < i; ++j) labels[items[j]] = g - 1;
    i = a;
    --g;
  }
  return labels;
}

}  // namespace detail

// Maps [k] to at most l outputs while keeping Hellinger mass in a form that
// randomized response preserves:
//  * k <= l: identity.
//  * comparable contribution below d_h^2 / 2: best binary threshold.
//  * otherwise: comparable elements bucketed (dyadic ranges of the ratio, or
//    the best contiguous runs in ratio order, whichever keeps more
//    comparable mass after merging); all else shares the last output.
inline Reduction reduce_channel(const Distribution& p, const Distribution& q,
                                int l) {
  if (l < 2) throw std::invalid_argument("reduce_channel: l >= 2");
  const std::size_t k = p.size();
  Reduction out;
  if (k <= static_cast<std::size_t>(l)) {
    out.channel = Channel::Identity(k);
    out.branch = Reduction::Branch::kIdentity;
    out.retained = hellinger_sq(p, q);
    return out;
  }
  const double h = hellinger_sq(p, q);
  const auto split = SplitComparable(p, q);
  if (split.contribution < 0.5 * h) {
    const auto best = maximize_comm(p, q, 2, Objective::HellingerSq());
    out.channel = best.channel;
    out.branch = Reduction::Branch::kBinary;
    out.retained = best.value;
    return out;
  }

  const auto dyadic = detail::DyadicBuckets(p, q, split, l);
  const auto grouped = detail::ContiguousBuckets(p, q, split, l);
  auto comparable_after = [&](const std::vector<int>& labels) {
    const auto t = Channel::Deterministic(l, labels);
    return SplitComparable(apply(t, p), apply(t, q)).contribution;
  };
  const auto& labels =
      comparable_after(grouped) > comparable_after(dyadic) ? grouped : dyadic;
  out.channel = Channel::Deterministic(l, labels);
  out.branch = Reduction::Branch::kBuckets;
  out.retained = hellinger_sq(apply(out.channel, p), apply(out.channel, q));
  return out;
}

// Output size used by free_privacy_channel:
// min(max(2, ceil(log2(1 / d_h^2))), k, floor(e^eps)).
inline int FreePrivacyOutputs(const Distribution& p, const Distribution& q,
                              double eps) {
  const double h = hellinger_sq(p, q);
  const int by_h =
      h > 0.0 ? std::max(2, static_cast<int>(std::ceil(std::log2(1.0 / h))))
              : 2;
  const double e = ExpEps(eps);
  const int by_eps = e >= 1e9 ? 1000000000 : static_cast<int>(std::floor(e));
  return std::max(2, std::min({by_h, static_cast<int>(p.size()), by_eps}));
}

// Randomized response over the outputs of reduce_channel.
inline Channel free_privacy_channel(const Distribution& p,
                                    const Distribution& q, double eps) {
  if (!(eps > 1.0)) throw std::invalid_argument("free_privacy_channel: eps > 1");
  if (p.size() < 2) {
    throw std::invalid_argument("free_privacy_channel: k >= 2");
  }
  const int l = FreePrivacyOutputs(p, q, eps);
  const auto reduced = reduce_channel(p, q, l);
  const int m = static_cast<int>(reduced.channel.output_size());
  return compose(randomized_response(m, eps), reduced.channel);
}

// The best two-output eps-LDP channel with probability 1 - delta, and the
// input itself (on a separate block of outputs) with probability delta.
inline Channel approx_ldp_channel(const Distribution& p, const Distribution& q,
                                  double eps, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("approx_ldp_channel: delta in [0, 1]");
  }
  const int k = static_cast<int>(p.size());
  const auto best =
      maximize_private(p, q, pure_ldp_family(k, 2, eps),
                       Objective::HellingerSq())
          .channel;
  const int block = std::max(k, 2);
  std::vector<double> data(static_cast<std::size_t>((block + k) * k), 0.0);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < k; ++c) data[r * k + c] = (1.0 - delta) * best(r, c);
  }
  for (int c = 0; c < k; ++c) data[(block + c) * k + c] = delta;
  return Channel(block + k, k, std::move(data));
}

// ---------------------------------------------------------------------------
// Sample-complexity curves.

struct CurvePoint {
  double eps = 0.0;
  double e_eps = 0.0;
  double n_hat = kInfinity;  // 1 / max d_h^2 over the family
  std::string certificate;
};

// Maximum of d_h^2 over eps-LDP channels with l outputs: closed form for
// binary pairs, extreme-point search otherwise.
inline OptResult MaxPrivateHellinger(const Distribution& p,
                                     const Distribution& q, double eps,
                                     int l) {
  const auto canon = canonicalize(p, q);
  if (canon.size() == 2 && l >= 2) {
    const auto lifted = compose(randomized_response(2, eps),
                                canon.MergeChannel());
    Certificate cert;
    cert.kind = Certificate::Kind::kDecomposition;
    cert.cuts = {1};
    cert.inner = canon.MergeChannel();
    cert.outer = randomized_response(2, eps);
    OptResult out{lifted, Objective::HellingerSq().Evaluate(lifted, p, q),
                  cert};
    return out;
  }
  return maximize_private(p, q,
                          pure_ldp_family(static_cast<int>(p.size()), l, eps),
                          Objective::HellingerSq());
}

inline std::vector<CurvePoint> complexity_curve(
    const Distribution& p, const Distribution& q,
    const std::vector<double>& e_eps_grid, int l) {
  std::vector<CurvePoint> out(e_eps_grid.size());
  ParallelFor(e_eps_grid.size(), [&](std::size_t i) {
    const double e = e_eps_grid[i];
    if (!(e >= 1.0)) throw std::invalid_argument("curve: e^eps must be >= 1");
    CurvePoint& pt = out[i];
    pt.e_eps = e;
    pt.eps = std::log(e);
    const auto best = MaxPrivateHellinger(p, q, pt.eps, l);
    pt.n_hat = best.value > 0.0 ? 1.0 / best.value : kInfinity;
    pt.certificate = best.certificate.Describe();
  });
  return out;
}

// Smallest grid eps whose n_hat is within `factor` of the non-private
// 1 / d_h^2(p, q); +inf if none.
inline double FreePrivacyThreshold(const std::vector<CurvePoint>& curve,
                                   const Distribution& p,
                                   const Distribution& q,
                                   double factor = 10.0) {
  const double n_inf = 1.0 / hellinger_sq(p, q);
  for (const auto& pt : curve) {
    if (pt.n_hat <= factor * n_inf) return pt.eps;
  }
  return kInfinity;
}

// e^eps values from `start` to `stop`, log-spaced.
inline std::vector<double> LogGrid(double start, double stop, int points) {
  if (!(start > 0.0 && stop >= start) || points < 1) {
    throw std::invalid_argument("grid: need 0 < start <= stop, points >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = start;
    return out;
  }
  const double a = std::log(start), b = std::log(stop);
  for (int i = 0; i < points; ++i) {
    out[i] = std::exp(a + (b - a) * i / (points - 1));
  }
  out.back() = stop;
  return out;
}

}  // namespace ldpopt
