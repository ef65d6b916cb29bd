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

// Monte Carlo for the non-interactive protocol: n users draw X_i from p (or
// q), each reports Y_i = T(X_i), and the server runs the likelihood-ratio
// test on the histogram of reports.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ldpopt/core.hpp"
#include "ldpopt/parallel.hpp"
#include "ldpopt/rng.hpp"

namespace ldpopt {

struct ProtocolConfig {
  Distribution p;
  Distribution q;
  Channel channel;
  std::int64_t n = 1;
  int trials = 1;
  std::uint64_t seed = 0;
};

struct ErrorReport {
  double type1 = 0.0;  // decide q while p is true
  double type2 = 0.0;  // decide p while q is true
  double sum = 0.0;
  double half_width = 0.0;  // summed 95% Wilson half-widths
  std::int64_t type1_count = 0;
  std::int64_t type2_count = 0;
  int trials = 0;

  friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

// Half-width of the 95% Wilson score interval for `errors` out of `trials`.
inline double WilsonHalfWidth(std::int64_t errors, int trials) {
  constexpr double z = 1.959963984540054;
  const double n = trials;
  const double phat = static_cast<double>(errors) / n;
  return z / (1.0 + z * z / n) *
         std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n));
}

namespace detail {

// Per-output log-likelihood ratio with +-inf where one side vanishes.
struct LlrTable {
  std::vector<double> weight;
  std::vector<bool> only_p;  // Tq(y) == 0 < Tp(y)
  std::vector<bool> only_q;  // Tp(y) == 0 < Tq(y)
};

inline LlrTable MakeLlrTable(const Distribution& tp, const Distribution& tq) {
  LlrTable out;
  const std::size_t l = tp.size();
  out.weight.assign(l, 0.0);
  out.only_p.assign(l, false);
  out.only_q.assign(l, false);
  for (std::size_t y = 0; y < l; ++y) {
    if (tp[y] > 0.0 && tq[y] > 0.0) {
      out.weight[y] = std::log(tp[y]) - std::log(tq[y]);
    } else if (tp[y] > 0.0) {
      out.only_p[y] = true;
    } else if (tq[y] > 0.0) {
      out.only_q[y] = true;
    }
  }
  return out;
}

// Draws n inputs from `source`, pushes each through the channel, and returns
// the output histogram. Sampling is sequential-binomial at both stages.
inline std::vector<std::int64_t> SampleReports(const Distribution& source,
                                               const Channel& t,
                                               std::int64_t n, Philox& rng) {
  auto multinomial = [&rng](std::int64_t total, auto&& prob_at,
                            std::size_t size, std::vector<std::int64_t>& out) {
    double remaining_mass = 1.0;
    for (std::size_t i = 0; i < size && total > 0; ++i) {
      const double pi = prob_at(i);
      if (i + 1 == size || remaining_mass <= 0.0) {
        out[i] += total;
        break;
      }
      const double frac = std::clamp(pi / remaining_mass, 0.0, 1.0);
      std::binomial_distribution<std::int64_t> draw(total, frac);
      const std::int64_t got = frac >= 1.0 ? total : draw(rng);
      out[i] += got;
      total -= got;
      remaining_mass -= pi;
    }
  };
  std::vector<std::int64_t> inputs(t.input_size(), 0);
  multinomial(n, [&](std::size_t i) { return source[i]; }, source.size(),
              inputs);
  std::vector<std::int64_t> reports(t.output_size(), 0);
  for (std::size_t x = 0; x < inputs.size(); ++x) {
    if (inputs[x] == 0) continue;
    multinomial(inputs[x], [&](std::size_t y) { return t(y, x); },
                t.output_size(), reports);
  }
  return reports;
}

// True when the LRT decides p (ties included).
inline bool DecidesP(const LlrTable& table,
                     const std::vector<std::int64_t>& counts) {
  bool saw_p = false, saw_q = false;
  double llr = 0.0;
  for (std::size_t y = 0; y < counts.size(); ++y) {
    if (counts[y] == 0) continue;
    if (table.only_p[y]) saw_p = true;
    if (table.only_q[y]) saw_q = true;
    llr += static_cast<double>(counts[y]) * table.weight[y];
  }
  if (saw_p) return true;
  if (saw_q) return false;
  return llr >= 0.0;
}

}  // namespace detail

inline ErrorReport run_protocol(const ProtocolConfig& cfg) {
  if (cfg.channel.input_size() != cfg.p.size() ||
      cfg.p.size() != cfg.q.size()) {
    throw std::invalid_argument("run_protocol: channel/pair size mismatch");
  }
  if (cfg.n < 1 || cfg.trials < 1) {
    throw std::invalid_argument("run_protocol: need n >= 1 and trials >= 1");
  }
  const auto table = detail::MakeLlrTable(apply(cfg.channel, cfg.p),
                                          apply(cfg.channel, cfg.q));
  std::vector<unsigned char> wrong_p(cfg.trials), wrong_q(cfg.trials);
  ParallelFor(static_cast<std::size_t>(cfg.trials), [&](std::size_t i) {
    Philox under_p = Philox::ForTrial(cfg.seed, i, 0);
    Philox under_q = Philox::ForTrial(cfg.seed, i, 1);
    wrong_p[i] = !detail::DecidesP(
        table, detail::SampleReports(cfg.p, cfg.channel, cfg.n, under_p));
    wrong_q[i] = detail::DecidesP(
        table, detail::SampleReports(cfg.q, cfg.channel, cfg.n, under_q));
  });
  ErrorReport r;
  r.trials = cfg.trials;
  for (int i = 0; i < cfg.trials; ++i) {
    r.type1_count += wrong_p[i];
    r.type2_count += wrong_q[i];
  }
  r.type1 = static_cast<double>(r.type1_count) / cfg.trials;
  r.type2 = static_cast<double>(r.type2_count) / cfg.trials;
  r.sum = r.type1 + r.type2;
  r.half_width = WilsonHalfWidth(r.type1_count, cfg.trials) +
                 WilsonHalfWidth(r.type2_count, cfg.trials);
  return r;
}

inline constexpr std::int64_t kMaxSampleSize = std::int64_t{1} << 40;

// Smallest n (by doubling, then bisection) whose simulated error sum plus
// Wilson margin is at most `target`. Every n reuses the same seed.
inline std::int64_t find_sample_size(const Distribution& p,
                                     const Distribution& q, const Channel& t,
                                     double target = 0.1, int trials = 2000,
                                     std::uint64_t seed = 0) {
  if (!(hellinger_sq(apply(t, p), apply(t, q)) > 0.0)) {
    throw std::invalid_argument("zero divergence");
  }
  auto passes = [&](std::int64_t n) {
    const auto r = run_protocol({p, q, t, n, trials, seed});
    return r.sum + r.half_width <= target;
  };
  std::int64_t hi = 1;
  while (!passes(hi)) {
    if (hi >= kMaxSampleSize) {
      throw std::runtime_error("find_sample_size: no n up to 2^40 passes");
    }
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // fails (or 0)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Exact error sum of the LRT with n reports from a two-output channel.
inline double exact_binary_lrt_error(const Distribution& p,
                                     const Distribution& q, const Channel& t,
                                     std::int64_t n) {
  if (t.output_size() != 2) {
    throw std::invalid_argument("exact_binary_lrt_error: two outputs needed");
  }
  const auto tp = apply(t, p);
  const auto tq = apply(t, q);
  const auto table = detail::MakeLlrTable(tp, tq);
  auto log_pmf = [n](std::int64_t j, double prob) {
    if (prob <= 0.0) return j == 0 ? 0.0 : -kInfinity;
    if (prob >= 1.0) return j == n ? 0.0 : -kInfinity;
    const double nd = static_cast<double>(n);
    const double jd = static_cast<double>(j);
    return std::lgamma(nd + 1) - std::lgamma(jd + 1) - std::lgamma(nd - jd + 1) +
           jd * std::log(prob) + (nd - jd) * std::log1p(-prob);
  };
  double type1 = 0.0, type2 = 0.0;
  for (std::int64_t j = 0; j <= n; ++j) {
    const std::vector<std::int64_t> counts{j, n - j};
    if (detail::DecidesP(table, counts)) {
      type2 += std::exp(log_pmf(j, tq[0]));
    } else {
      type1 += std::exp(log_pmf(j, tp[0]));
    }
  }
  return type1 + type2;
}

}  // namespace ldpopt
