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

// Property batteries behind `ldpopt verify`.

#ifndef LDPOPT_TOOLS_SUITES_H_
#define LDPOPT_TOOLS_SUITES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ldpopt/construct.hpp"
#include "ldpopt/ldp.hpp"
#include "ldpopt/optimize.hpp"
#include "ldpopt/parallel.hpp"
#include "ldpopt/sampling.hpp"
#include "ldpopt/sim.hpp"
#include "ldpopt/threshold.hpp"

namespace ldpopt::tools {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

using Suite = std::function<std::vector<Check>(std::uint64_t seed)>;

namespace detail {

inline std::string Num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Accumulates the worst observed margin of a family of inequalities.
struct Tally {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = kInfinity;  // smallest observed slack

  void Record(double slack) {
    ++cases;
    worst = std::min(worst, slack);
    if (!(slack >= 0.0)) ++failures;
  }

  Check Finish() const {
    return {name, cases > 0 && failures == 0,
            std::to_string(cases) + (cases == 1 ? " case, " : " cases, ") +
                std::to_string(failures) +
                " failures, worst slack " + Num(worst)};
  }
};

inline double RandomEps(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.1, 3.0)(rng);
}

}  // namespace detail

inline std::vector<Check> ExtremeCommSuite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  detail::Tally witness{"witness mixes back to (Tp, Tq) within 1e-10"};
  detail::Tally moves{"witness moves Tp"};
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + i % 4;
    const int l = k <= 4 && i % 2 ? 3 : 2;
    const auto [p, q] = RandomCanonicalPair(k, rng);
    const auto order = likelihood_order(p, q);
    for (const auto& t : AllDeterministic(k, l)) {
      if (is_threshold(t, order)) continue;
      const auto w = non_extremality_witness(t, p, q);
      witness.Record(1e-10 - w.MixingError(t, p, q));
      moves.Record(w.Displacement(t, p) - 1e-12);
    }
  }
  detail::Tally optimal{"threshold optimum >= random search"};
  const std::vector<Objective> objectives{
      Objective::HellingerSq(), Objective::Tv(), Objective::Kl(),
      Objective::Renyi(2.0), Objective::Chernoff()};
  for (int i = 0; i < 10; ++i) {
    const int k = 2 + i % 5;
    const int l = 2 + i % 2;
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    const auto& g = objectives[i % objectives.size()];
    const double best = maximize_comm(p, q, l, g).value;
    const double search =
        oracle_random_search(p, q, CommConstraint{l}, g, 500, seed + i);
    optimal.Record(best - search + 1e-9);
  }
  return {witness.Finish(), moves.Finish(), optimal.Finish()};
}

inline std::vector<Check> ExtremeLdpSuite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  detail::Tally catalog{"catalog matches vertex enumeration (l = 2)"};
  for (int k = 2; k <= 5; ++k) {
    const auto f = pure_ldp_family(k, 2, detail::RandomEps(rng));
    const auto listed = extreme_points_catalog(f);
    const auto enumerated = vertex_enumeration(f);
    int missing = listed.size() == enumerated.size() ? 0 : 1;
    for (const auto& t : listed) {
      const bool found = std::any_of(
          enumerated.begin(), enumerated.end(),
          [&](const Channel& v) { return MaxAbsDifference(t, v) <= 1e-9; });
      if (!found || !membership(f, t)) ++missing;
    }
    catalog.Record(-missing);
  }
  detail::Tally free_entries{"vertices have <= 1 free entry per column"};
  detail::Tally unique{"vertices have <= l 2^(l-1) unique columns"};
  for (const auto [k, l] : {std::pair{2, 2}, {3, 2}, {4, 2}, {5, 2},
                            {6, 2}, {2, 3}, {3, 3}, {4, 3}}) {
    const double delta = std::uniform_real_distribution<double>(0, 0.2)(rng);
    const auto f = sldp_family(k, l, detail::RandomEps(rng), delta);
    for (const auto& t : vertex_enumeration(f)) {
      const auto counts = FreeEntriesPerColumn(t);
      free_entries.Record(1 - *std::max_element(counts.begin(), counts.end()));
      unique.Record(static_cast<double>(l * (1 << (l - 1))) -
                    static_cast<double>(CountUniqueColumns(t)));
    }
  }
  detail::Tally optimal{"decomposition optimum >= random search"};
  for (int i = 0; i < 10; ++i) {
    const int k = 2 + i % 3;
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    const double eps = detail::RandomEps(rng);
    const auto f = i % 2 ? sldp_family(k, 2, eps, 0.05)
                         : pure_ldp_family(k, 2, eps);
    const auto g = Objective::HellingerSq();
    const double best = maximize_private(p, q, f, g).value;
    const double search = oracle_random_search(p, q, f, g, 500, seed + i);
    optimal.Record(best - search + 1e-6);
  }
  return {catalog.Finish(), free_entries.Finish(), unique.Finish(),
          optimal.Finish()};
}

inline std::vector<Check> SdpiSuite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  detail::Tally identity{"TV contraction identity within 1e-12"};
  for (int i = 0; i < 1000; ++i) {
    const auto p = RandomDistribution(2, rng);
    const auto q = RandomDistribution(2, rng);
    const auto r = sdpi_binary(p, q, 10.0 * std::generate_canonical<double, 53>(rng));
    identity.Record(1e-12 - std::abs(r.tv - r.tv_identity));
  }
  detail::Tally argmax{"randomized response >= random search"};
  detail::Tally agree{"decomposition optimum equals randomized response"};
  for (int i = 0; i < 25; ++i) {
    const auto p = RandomDistribution(2, rng);
    const auto q = RandomDistribution(2, rng);
    for (double eps : {0.1, 1.0, std::log(10.0), 10.0}) {
      const auto r = sdpi_binary(p, q, eps);
      const auto f = pure_ldp_family(2, 2, eps);
      const auto g = Objective::HellingerSq();
      argmax.Record(r.hellinger_sq + 1e-6 -
                    oracle_random_search(p, q, f, g, 300, seed + i));
      agree.Record(1e-12 -
                   std::abs(maximize_private(p, q, f, g).value - r.hellinger_sq));
    }
  }
  return {identity.Finish(), argmax.Finish(), agree.Finish()};
}

inline std::vector<Check> FreePrivacySuite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  detail::Tally retained{"retains >= d_h^2 / 64"};
  detail::Tally private_{"channel is eps-LDP"};
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + static_cast<int>(rng() % 15);
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    const double h = hellinger_sq(p, q);
    const double floor = std::max(1.0 / h * std::log(1.0 / h), std::exp(1.0));
    const double eps =
        std::log(floor) + std::uniform_real_distribution<double>(0, 3)(rng) +
        1e-9;
    const auto t = free_privacy_channel(p, q, eps);
    retained.Record(hellinger_sq(apply(t, p), apply(t, q)) - h / 64.0);
    const auto f = pure_ldp_family(k, static_cast<int>(t.output_size()), eps);
    private_.Record(membership(f, t, 1e-9) ? 0.0 : -1.0);
  }
  return {retained.Finish(), private_.Finish()};
}

inline std::vector<Check> SimSuite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  detail::Tally error{"error sum <= 0.1 at n = ceil(32 / d_h^2)"};
  for (int i = 0; i < 6; ++i) {
    const int k = 2 + i;
    const auto p = RandomDistribution(k, rng);
    const auto q = RandomDistribution(k, rng);
    const auto t = minimax_channel(p, q, 0.5 + i);
    const double h = hellinger_sq(apply(t, p), apply(t, q));
    const auto n = static_cast<std::int64_t>(std::ceil(32.0 / h));
    error.Record(0.1 - run_protocol({p, q, t, n, 2000, seed + i}).sum);
  }
  detail::Tally exact{"binary simulation within 3 SE of exact error"};
  for (int i = 0; i < 5; ++i) {
    const auto p = RandomDistribution(3, rng);
    const auto q = RandomDistribution(3, rng);
    const auto t = minimax_channel(p, q, 1.0);
    const double h = hellinger_sq(apply(t, p), apply(t, q));
    const auto n = static_cast<std::int64_t>(std::ceil(2.0 / h));
    const int trials = 5000;
    const auto r = run_protocol({p, q, t, n, trials, seed + 100 + i});
    const double se = std::sqrt(
        (r.type1 * (1 - r.type1) + r.type2 * (1 - r.type2)) / trials);
    exact.Record(3.0 * std::max(se, 1.0 / trials) -
                 std::abs(r.sum - exact_binary_lrt_error(p, q, t, n)));
  }
  detail::Tally repro{"reports identical across thread counts"};
  {
    const auto p = RandomDistribution(4, rng);
    const auto q = RandomDistribution(4, rng);
    const ProtocolConfig cfg{p, q, randomized_response(4, 1.0), 300, 3000,
                             seed};
    const int saved = ::ldpopt::detail::ThreadOverride();
    SetThreadCount(1);
    const auto one = run_protocol(cfg);
    SetThreadCount(3);
    const auto three = run_protocol(cfg);
    SetThreadCount(saved);
    repro.Record(one == three ? 0.0 : -1.0);
  }
  return {error.Finish(), exact.Finish(), repro.Finish()};
}

inline const std::map<std::string, Suite>& Suites() {
  static const std::map<std::string, Suite> suites{
      {"extreme-comm", ExtremeCommSuite},
      {"extreme-ldp", ExtremeLdpSuite},
      {"sdpi", SdpiSuite},
      {"free-privacy", FreePrivacySuite},
      {"sim", SimSuite}};
  return suites;
}

}  // namespace ldpopt::tools

#endif  // LDPOPT_TOOLS_SUITES_H_
