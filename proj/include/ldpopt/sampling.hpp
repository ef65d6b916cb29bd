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

// Random distributions, channels and pairs for property batteries.

#ifndef LDPOPT_SAMPLING_HPP_
#define LDPOPT_SAMPLING_HPP_

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "ldpopt/core.hpp"

namespace ldpopt {

template <typename Rng>
Distribution RandomDistribution(std::size_t k, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  for (double& v : w) v = expo(rng) + 1e-3;
  return Distribution::Normalized(std::move(w));
}

// Occasional zeros and repeated values, so canonicalization has ties and
// empty symbols to handle.
template <typename Rng>
Distribution RandomDistributionWithTies(std::size_t k, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 4);
  std::vector<double> w(k);
  for (double& v : w) v = static_cast<double>(pick(rng));
  bool any = false;
  for (double v : w) any = any || v > 0.0;
  if (!any) w[0] = 1.0;
  return Distribution::Normalized(std::move(w));
}

template <typename Rng>
Channel RandomChannel(std::size_t l, std::size_t k, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> data(l * k);
  for (std::size_t c = 0; c < k; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < l; ++r) sum += data[r * k + c] = expo(rng);
    for (std::size_t r = 0; r < l; ++r) data[r * k + c] /= sum;
  }
  return Channel(l, k, std::move(data));
}

// Pairwise distinct, well-separated likelihood ratios.
template <typename Rng>
std::pair<Distribution, Distribution> RandomCanonicalPair(std::size_t k,
                                                          Rng& rng) {
  while (true) {
    auto p = RandomDistribution(k, rng);
    auto q = RandomDistribution(k, rng);
    const auto c = canonicalize(p, q);
    if (c.size() != k) continue;
    bool separated = true;
    for (std::size_t j = 1; j < k; ++j) {
      if (c.ratios[j].value < c.ratios[j - 1].value * (1.0 + 1e-6)) {
        separated = false;
      }
    }
    if (separated) return {std::move(p), std::move(q)};
  }
}

// Every deterministic channel from k inputs to l outputs, in base-l order.
inline std::vector<Channel> AllDeterministic(int k, int l) {
  std::vector<Channel> out;
  std::vector<int> map(static_cast<std::size_t>(k), 0);
  while (true) {
    out.push_back(Channel::Deterministic(static_cast<std::size_t>(l), map));
    int pos = 0;
    while (pos < k && ++map[pos] == l) map[pos++] = 0;
    if (pos == k) return out;
  }
}

}  // namespace ldpopt

#endif  // LDPOPT_SAMPLING_HPP_
