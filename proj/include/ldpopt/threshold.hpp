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

// Threshold channels: deterministic maps whose preimages are contiguous runs
// of the likelihood-ratio order. Every extreme point of the joint range under
// a pure communication constraint comes from one of these, and
// non_extremality_witness exhibits the splitting for any other deterministic
// channel.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ldpopt/core.hpp"

namespace ldpopt {

// Splits the sorted alphabet into `labeling.size()` contiguous, possibly
// empty blocks. Block b covers sorted positions [cuts[b-1], cuts[b]) with
// cuts[-1] = 0 and cuts[l-1] = k, and is sent to output labeling[b].
struct ThresholdPartition {
  std::vector<int> cuts;      // l - 1 non-decreasing positions in [0, k]
  std::vector<int> labeling;  // permutation of [l]

  std::size_t output_size() const { return labeling.size(); }

  // Output of the input at sorted position `pos`.
  int OutputAt(int pos) const {
    const auto block = std::upper_bound(cuts.begin(), cuts.end(), pos) -
                       cuts.begin();
    return labeling[static_cast<std::size_t>(block)];
  }

  Channel ToChannel(const LikelihoodOrder& order) const {
    std::vector<int> labels(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      labels[order.permutation[pos]] = OutputAt(static_cast<int>(pos));
    }
    return Channel::Deterministic(output_size(), labels);
  }
};

// C(n, r) as a double; exact for the sizes used here.
inline double Binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  r = std::min(r, n - r);
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

inline std::size_t ThresholdCount(int k, int l) {
  return static_cast<std::size_t>(Binomial(k + l - 1, l - 1) + 0.5);
}

// Calls fn(cuts) for every non-decreasing cut vector of length l - 1 over
// [0, k], in lexicographic order. Stops early if fn returns false.
template <typename Fn>
void ForEachThresholdCuts(int k, int l, Fn&& fn) {
  if (k < 1 || l < 1) throw std::invalid_argument("threshold: k, l >= 1");
  std::vector<int> cuts(static_cast<std::size_t>(l - 1), 0);
  while (true) {
    if constexpr (std::is_same_v<decltype(fn(cuts)), bool>) {
      if (!fn(std::as_const(cuts))) return;
    } else {
      fn(std::as_const(cuts));
    }
    int i = l - 2;
    while (i >= 0 && cuts[i] == k) --i;
    if (i < 0) return;
    ++cuts[i];
    for (int j = i + 1; j < l - 1; ++j) cuts[j] = cuts[i];
  }
}

inline std::vector<std::vector<int>> ThresholdCutList(int k, int l) {
  std::vector<std::vector<int>> out;
  out.reserve(ThresholdCount(k, l));
  ForEachThresholdCuts(k, l, [&](const std::vector<int>& c) {
    out.push_back(c);
  });
  return out;
}

inline ThresholdPartition CanonicalPartition(std::vector<int> cuts) {
  ThresholdPartition part;
  part.labeling.resize(cuts.size() + 1);
  std::iota(part.labeling.begin(), part.labeling.end(), 0);
  part.cuts = std::move(cuts);
  return part;
}

// All l-output threshold channels under `order`, canonically labeled, in
// lexicographic cut order. There are C(k + l - 1, l - 1) of them.
inline std::vector<Channel> enumerate_threshold(int k, int l,
                                                const LikelihoodOrder& order) {
  if (order.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("enumerate_threshold: order size != k");
  }
  std::vector<Channel> out;
  ForEachThresholdCuts(k, l, [&](const std::vector<int>& cuts) {
    out.push_back(CanonicalPartition(cuts).ToChannel(order));
  });
  return out;
}

// The partition of inputs a deterministic channel induces, with output
// labels forgotten. Two channels agree up to relabeling iff these match.
inline std::set<std::vector<int>> PreimageSignature(const Channel& t) {
  std::map<int, std::vector<int>> blocks;
  const auto labels = t.Labels();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    blocks[labels[c]].push_back(static_cast<int>(c));
  }
  std::set<std::vector<int>> sig;
  for (auto& [label, members] : blocks) sig.insert(std::move(members));
  return sig;
}

inline std::vector<Channel> DeduplicateUpToRelabeling(
    const std::vector<Channel>& channels) {
  std::set<std::set<std::vector<int>>> seen;
  std::vector<Channel> out;
  for (const auto& t : channels) {
    if (seen.insert(PreimageSignature(t)).second) out.push_back(t);
  }
  return out;
}

inline bool is_threshold(const Channel& t, const LikelihoodOrder& order) {
  if (order.size() != t.input_size()) {
    throw std::invalid_argument("is_threshold: order size != input size");
  }
  const auto labels = t.Labels();
  std::vector<bool> closed(t.output_size(), false);
  int current = -1;
  for (int input : order.permutation) {
    const int label = labels[input];
    if (label == current) continue;
    if (closed[label]) return false;
    if (current >= 0) closed[current] = true;
    current = label;
  }
  return true;
}

// Two channels whose equal mixture reproduces (Tp, Tq) while moving Tp.
struct ExtremalityWitness {
  Channel first;
  Channel second;
  double weight = 0.5;

  // Largest deviation of the mixture from (Tp, Tq).
  double MixingError(const Channel& t, const Distribution& p,
                     const Distribution& q) const {
    double worst = 0.0;
    for (const Distribution* d : {&p, &q}) {
      const auto target = apply(t, *d);
      const auto a = apply(first, *d);
      const auto b = apply(second, *d);
      for (std::size_t r = 0; r < target.size(); ++r) {
        worst = std::max(worst, std::abs(weight * a[r] +
                                         (1.0 - weight) * b[r] - target[r]));
      }
    }
    return worst;
  }

  // How far the first component moves Tp.
  double Displacement(const Channel& t, const Distribution& p) const {
    return MaxAbsDifference(apply(first, p).probs(), apply(t, p).probs());
  }
};

class IsThresholdError : public std::logic_error {
 public:
  IsThresholdError() : std::logic_error("is-threshold") {}
};

namespace detail {

inline std::vector<double> MutableData(const Channel& t) { return t.data(); }

inline void SetEntry(std::vector<double>& data, std::size_t cols,
                     std::size_t r, std::size_t c, double v) {
  data[r * cols + c] = v;
}

}  // namespace detail

// For a deterministic T that is not a threshold channel under the ratio
// order of a canonical pair (p, q), finds sorted positions a < b < c with
// T(a) = T(c) = m != n = T(b) and splits T into two channels: one leaks a
// little of a and b across outputs m and n, the other a little of c and b.
// Step sizes keep q fixed and cancel the p-displacement in the mixture.
inline ExtremalityWitness non_extremality_witness(const Channel& t,
                                                  const Distribution& p,
                                                  const Distribution& q) {
  if (t.input_size() != p.size() || p.size() != q.size()) {
    throw std::invalid_argument("witness: size mismatch");
  }
  const auto order = likelihood_order(p, q);
  if (is_threshold(t, order)) throw IsThresholdError();
  const auto labels = t.Labels();
  const std::size_t k = order.size();

  // First sorted position b whose label differs from its predecessor's and
  // whose predecessor's label reappears later.
  std::size_t pa = 0, pb = 0, pc = 0;
  bool found = false;
  for (std::size_t i = 0; i + 1 < k && !found; ++i) {
    const int m = labels[order.permutation[i]];
    if (labels[order.permutation[i + 1]] == m) continue;
    for (std::size_t j = i + 2; j < k; ++j) {
      if (labels[order.permutation[j]] == m) {
        pa = i;
        pb = i + 1;
        pc = j;
        found = true;
        break;
      }
    }
  }
  if (!found) throw IsThresholdError();

  const int a = order.permutation[pa];
  const int b = order.permutation[pb];
  const int c = order.permutation[pc];
  const auto m = static_cast<std::size_t>(labels[a]);
  const auto n = static_cast<std::size_t>(labels[b]);

  const double x = q[a] * p[b] / q[b] - p[a];
  const double y = p[c] - q[c] * p[b] / q[b];
  if (!(q[a] > 0.0 && q[b] > 0.0 && x > 0.0 && y > 0.0)) {
    throw std::invalid_argument(
        "witness: likelihood ratios are not strictly increasing; "
        "canonicalize the pair first");
  }

  double step = std::min({1.0, q[b] / q[a], y / x});
  if (q[c] > 0.0) step = std::min(step, y * q[b] / (x * q[c]));
  step *= 0.5;

  const double e1 = step;
  const double e2 = e1 * q[a] / q[b];
  const double e3 = step * x / y;
  const double e4 = q[c] > 0.0 ? e3 * q[c] / q[b] : 0.0;

  const std::size_t cols = t.input_size();
  auto first = detail::MutableData(t);
  detail::SetEntry(first, cols, m, a, 1.0 - e1);
  detail::SetEntry(first, cols, n, a, e1);
  detail::SetEntry(first, cols, n, b, 1.0 - e2);
  detail::SetEntry(first, cols, m, b, e2);

  auto second = detail::MutableData(t);
  detail::SetEntry(second, cols, m, c, 1.0 - e3);
  detail::SetEntry(second, cols, n, c, e3);
  detail::SetEntry(second, cols, n, b, 1.0 - e4);
  detail::SetEntry(second, cols, m, b, e4);

  return {Channel(t.output_size(), cols, std::move(first)),
          Channel(t.output_size(), cols, std::move(second)), 0.5};
}

}  // namespace ldpopt
