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

// Acceptance suite: one PASS/FAIL line per criterion, each with its own
// wall-clock budget. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ldpopt/construct.hpp"
#include "ldpopt/core.hpp"
#include "ldpopt/ldp.hpp"
#include "ldpopt/optimize.hpp"
#include "ldpopt/sampling.hpp"
#include "ldpopt/sim.hpp"
#include "ldpopt/threshold.hpp"

namespace ldpopt {
namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double LogUniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(Uniform(rng, std::log(lo), std::log(hi)));
}

const std::vector<double>& SdpiEps() {
  static const std::vector<double> eps{0.1, 1.0, std::log(10.0), 10.0};
  return eps;
}

Outcome BinarySdpiArgmax() {
  std::mt19937_64 rng(101);
  const auto g = Objective::HellingerSq();
  double worst = -kInfinity;
  int cases = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = RandomDistribution(2, rng);
    const auto q = RandomDistribution(2, rng);
    for (double eps : SdpiEps()) {
      const double rr = sdpi_binary(p, q, eps).hellinger_sq;
      const double search = oracle_random_search(
          p, q, pure_ldp_family(2, 2, eps), g, 10000, 1000 + cases);
      worst = std::max(worst, search - rr);
      ++cases;
    }
  }
  return {worst <= 1e-6,
          Fmt("%.0f cases, max(search - RR) = %.3g", cases, worst)};
}

Outcome TvContractionIdentity() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = RandomDistribution(2, rng);
    const auto q = RandomDistribution(2, rng);
    const double eps = Uniform(rng, 0.0, 12.0);
    const auto t = randomized_response(2, eps);
    const double e = std::exp(eps);
    const double lhs = tv(apply(t, p), apply(t, q));
    const double rhs = 0.5 * (std::abs(p[0] - q[0]) + std::abs(p[1] - q[1])) *
                       (e - 1.0) / (e + 1.0);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= 1e-12, Fmt("10000 instances, max error %.3g", worst)};
}

Outcome WitnessSuite() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  int channels = 0;
  bool moved = true;
  for (int k = 2; k <= 5; ++k) {
    for (int i = 0; i < 20; ++i) {
      const auto [p, q] = RandomCanonicalPair(k, rng);
      const auto order = likelihood_order(p, q);
      for (const auto& t : AllDeterministic(k, 2)) {
        if (is_threshold(t, order)) continue;
        const auto w = non_extremality_witness(t, p, q);
        worst = std::max(worst, w.MixingError(t, p, q));
        moved = moved && w.Displacement(t, p) > 1e-12;
        ++channels;
      }
    }
  }
  return {worst <= 1e-10 && moved && channels > 0,
          Fmt("%.0f non-threshold channels over 80 pairs (k = 2..5), max "
              "mixing error %.3g",
              channels, worst) +
              (moved ? "" : "; some witness left Tp in place")};
}

Outcome DecompositionOptimality() {
  std::mt19937_64 rng(104);
  double worst = -kInfinity;
  int cases = 0;
  const std::vector<Objective> objectives{Objective::HellingerSq(),
                                          Objective::Tv()};
  for (int i = 0; i < 50; ++i) {
    const int k = 2 + i % 4;
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    for (double eps : {1.0, std::log(10.0)}) {
      const auto f = pure_ldp_family(k, 2, eps);
      for (const auto& g : objectives) {
        const double best = maximize_private(p, q, f, g).value;
        const double search =
            oracle_random_search(p, q, f, g, 10000, 2000 + cases);
        worst = std::max(worst, search - best);
        ++cases;
      }
    }
  }
  return {worst <= 1e-6,
          Fmt("%.0f cases (hellinger_sq and tv), max(search - optimum) = %.3g",
              cases, worst)};
}

Outcome ThreePhaseCurve() {
  const double rho = 1e-8, nu = 1e-5;
  const auto ternary = worst_case_pair(rho, nu);
  const auto binary = binary_pair(rho, nu);
  const auto grid = LogGrid(1.0, 1e10, 60);
  const auto t_curve = complexity_curve(ternary.p, ternary.q, grid, 3);
  const double knee = 100.0 * rho / (nu * nu);
  const double b_knee =
      complexity_curve(binary.p, binary.q, {knee}, 2).front().n_hat;
  const bool a = b_knee <= 10.0 / rho && b_knee >= 0.1 / rho;

  double plateau_lo = kInfinity, plateau_hi = 0.0;
  for (const auto& pt : t_curve) {
    if (pt.e_eps < 10.0 || pt.e_eps > 1e5) continue;
    plateau_lo = std::min(plateau_lo, pt.n_hat * nu * nu);
    plateau_hi = std::max(plateau_hi, pt.n_hat * nu * nu);
  }
  const bool b = plateau_lo >= 0.1 && plateau_hi <= 10.0;

  double first_free = kInfinity;
  for (const auto& pt : t_curve) {
    if (pt.n_hat <= 10.0 / rho) first_free = std::min(first_free, pt.e_eps);
  }
  const bool c = std::isfinite(first_free) && first_free >= 0.1 / rho;

  std::ostringstream detail;
  detail << "(a) binary n*rho at e^eps=" << knee << ": " << b_knee * rho
         << (a ? " ok" : " FAIL") << "; (b) ternary n*nu^2 on [10, 1e5] in ["
         << plateau_lo << ", " << plateau_hi << "]" << (b ? " ok" : " FAIL")
         << "; (c) ternary first within 10/rho at e^eps=" << first_free
         << " (needs >= " << 0.1 / rho << ")" << (c ? " ok" : " FAIL");
  return {a && b && c, detail.str()};
}

Outcome WorstCasePairs() {
  std::mt19937_64 rng(106);
  double tv_err = 0.0, h_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double nu = LogUniform(rng, 1e-6, 0.45);
    const double rho = LogUniform(rng, 2.0 * nu * nu, nu);
    const auto pair = worst_case_pair(rho, nu);
    tv_err = std::max(tv_err, std::abs(tv(pair.p, pair.q) - nu));
    h_err = std::max(h_err, std::abs(hellinger_sq(pair.p, pair.q) - rho));
  }
  return {tv_err <= 1e-12 && h_err <= 1e-9,
          Fmt("200 pairs, max |tv - nu| = %.3g, max |h - rho| = %.3g", tv_err,
              h_err)};
}

Outcome FreePrivacy() {
  std::mt19937_64 rng(107);
  double worst = kInfinity;
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + static_cast<int>(rng() % 15);
    const auto p = RandomDistribution(k, rng);
    auto q = RandomDistribution(k, rng);
    if (i % 2) {
      // Close pair: small distance, large threshold.
      const double mix = LogUniform(rng, 1e-3, 0.3);
      std::vector<double> w(k);
      for (int j = 0; j < k; ++j) w[j] = (1 - mix) * p[j] + mix * q[j];
      q = Distribution::Normalized(std::move(w));
    }
    const double h = hellinger_sq(p, q);
    const double floor = (1.0 / h) * std::log(1.0 / h);
    const double e_eps = std::max(floor, std::exp(1.0) * (1 + 1e-9)) *
                         LogUniform(rng, 1.0, 10.0);
    const auto t = free_privacy_channel(p, q, std::log(e_eps));
    worst = std::min(worst, hellinger_sq(apply(t, p), apply(t, q)) / h);
  }
  return {worst >= 1.0 / 64.0,
          Fmt("20 pairs (k <= 16), min retained fraction %.4g (>= %.4g)",
              worst, 1.0 / 64.0)};
}

Outcome ApproxLdp() {
  std::mt19937_64 rng(108);
  double identity_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int k = 2 + i % 4;
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    const double eps = Uniform(rng, 0.05, 4.0);
    const double delta = Uniform(rng, 0.0, 1.0);
    const auto t = approx_ldp_channel(p, q, eps, delta);
    const auto pure =
        maximize_private(p, q, pure_ldp_family(k, 2, eps),
                         Objective::HellingerSq());
    // Output blocks are disjoint, so the divergence splits exactly.
    const double mixed = hellinger_sq(apply(t, p), apply(t, q));
    const double parts = (1 - delta) * pure.value + delta * hellinger_sq(p, q);
    identity_err = std::max(identity_err, std::abs(mixed - parts));
    const auto tp = apply(t, p);
    const auto pp = apply(pure.channel, p);
    for (std::size_t r = 0; r < 2; ++r) {
      identity_err =
          std::max(identity_err, std::abs(tp[r] - (1 - delta) * pp[r]));
    }
    const std::size_t block = t.output_size() - p.size();
    for (std::size_t c = 0; c < p.size(); ++c) {
      identity_err =
          std::max(identity_err, std::abs(tp[block + c] - delta * p[c]));
    }
  }
  // Binary pairs: compare with max((1 - delta) v_eps, delta h), the
  // divergence form of the min over sample complexities.
  double lo = kInfinity, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto p = RandomDistribution(2, rng);
    const auto q = RandomDistribution(2, rng);
    const double eps = LogUniform(rng, 0.01, 5.0);
    const double delta = LogUniform(rng, 1e-4, 0.9);
    const double v_eps = sdpi_binary(p, q, eps).hellinger_sq;
    const double min_form =
        std::max((1 - delta) * v_eps, delta * hellinger_sq(p, q));
    const auto t = approx_ldp_channel(p, q, eps, delta);
    const double value = hellinger_sq(apply(t, p), apply(t, q));
    const double best_binary =
        maximize_private(p, q, approx_binary_family(2, eps, delta),
                         Objective::HellingerSq())
            .value;
    lo = std::min(lo, value / min_form);
    hi = std::max({hi, value / min_form, best_binary / min_form});
  }
  return {identity_err <= 1e-12 && lo >= 1.0 / 8.0 && hi <= 8.0,
          Fmt("1000 instances, max identity error %.3g; binary ratios to "
              "min-form in [%.3g, %.3g]",
              identity_err, lo, hi)};
}

Outcome Simulator() {
  std::mt19937_64 rng(109);
  const int trials = 10000;
  double worst_error = 0.0, worst_z = 0.0;
  int binary = 0;
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + i % 5;
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    Channel t;
    switch (i % 4) {
      case 0: t = Channel::Identity(k); break;
      case 1: t = randomized_response(k, Uniform(rng, 0.5, 3.0)); break;
      case 2: t = minimax_channel(p, q, Uniform(rng, 0.5, 3.0)); break;
      default: t = RandomChannel(2, k, rng); break;
    }
    const double h = hellinger_sq(apply(t, p), apply(t, q));
    const auto n = static_cast<std::int64_t>(std::ceil(32.0 / h));
    const auto r = run_protocol({p, q, t, n, trials, 3000u + i});
    worst_error = std::max(worst_error, r.sum);
    if (t.output_size() != 2) continue;
    // Also at a sample size where the error is far from zero.
    for (const std::int64_t m : {n, static_cast<std::int64_t>(std::ceil(1.0 / h))}) {
      const auto s = m == n ? r : run_protocol({p, q, t, m, trials, 4000u + i});
      const double se = std::sqrt(
          (s.type1 * (1 - s.type1) + s.type2 * (1 - s.type2)) / trials);
      const double gap = std::abs(s.sum - exact_binary_lrt_error(p, q, t, m));
      worst_z = std::max(worst_z, gap / std::max(se, 1.0 / trials));
      ++binary;
    }
  }
  return {worst_error <= 0.1 && worst_z <= 3.0,
          Fmt("20 instances, max error %.4g; %.0f binary checks, max gap %.3g SE",
              worst_error, binary, worst_z)};
}

Outcome PolytopeProperties() {
  std::mt19937_64 rng(110);
  std::vector<LpFamily> families;
  for (int l = 2; l <= 6; ++l) {
    for (int k = 2; l * k <= 12; ++k) {
      const double eps = Uniform(rng, 0.2, 2.5);
      families.push_back(pure_ldp_family(k, l, eps));
      families.push_back(sldp_family(k, l, eps, Uniform(rng, 0.01, 0.2)));
      if (l == 2) {
        families.push_back(approx_binary_family(k, eps, Uniform(rng, 0.01, 0.2)));
      }
    }
  }
  std::size_t vertices = 0;
  int violations = 0;
  std::vector<std::vector<Channel>> lists;
  for (const auto& f : families) {
    lists.push_back(vertex_enumeration(f));
    const auto cap = static_cast<std::size_t>(f.l * (1 << (f.l - 1)));
    for (const auto& t : lists.back()) {
      const auto free = FreeEntriesPerColumn(t);
      if (*std::max_element(free.begin(), free.end()) > 1) ++violations;
      if (CountUniqueColumns(t) > cap) ++violations;
      ++vertices;
    }
  }
  int outside = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t which = rng() % families.size();
    const auto& f = families[which];
    const auto& verts = lists[which];
    // A random convex combination of three vertices.
    std::vector<double> w{Uniform(rng, 0, 1), Uniform(rng, 0, 1),
                          Uniform(rng, 0, 1)};
    const double total = w[0] + w[1] + w[2];
    std::vector<double> data(static_cast<std::size_t>(f.l * f.k), 0.0);
    for (int j = 0; j < 3; ++j) {
      const auto& v = verts[rng() % verts.size()];
      for (int r = 0; r < f.l; ++r) {
        for (int c = 0; c < f.k; ++c) data[r * f.k + c] += w[j] / total * v(r, c);
      }
    }
    const Channel t(f.l, f.k, std::move(data));
    const int inputs = 1 + static_cast<int>(rng() % 6);
    const auto pre = RandomChannel(f.k, inputs, rng);
    if (!membership(f.WithInputs(inputs), compose(t, pre), 1e-9)) ++outside;
  }
  std::ostringstream detail;
  detail << families.size() << " families, " << vertices
         << " vertices, " << violations << " structure violations; "
         << outside << "/1000 compositions left the family";
  return {violations == 0 && outside == 0, detail.str()};
}

}  // namespace
}  // namespace ldpopt

int main() {
  using namespace ldpopt;
  const std::vector<Criterion> criteria{
      {1, "binary randomized response is the argmax", 60, BinarySdpiArgmax},
      {2, "TV contraction identity", 5, TvContractionIdentity},
      {3, "non-threshold witnesses mix back exactly", 60, WitnessSuite},
      {4, "decomposition optimum beats random search", 600,
       DecompositionOptimality},
      {5, "three-phase sample-complexity curve", 60, ThreePhaseCurve},
      {6, "worst-case pair hits (rho, nu)", 5, WorstCasePairs},
      {7, "free privacy retains a constant fraction", 60, FreePrivacy},
      {8, "approximate-LDP mixture identity", 10, ApproxLdp},
      {9, "simulator soundness", 300, Simulator},
      {10, "polytope vertex structure and closure", 120, PolytopeProperties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = out.ok && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %d %s: %s [%.2fs / %.0fs%s]\n", pass ? "PASS" : "FAIL",
                c.id, c.title.c_str(), out.detail.c_str(), secs,
                c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
