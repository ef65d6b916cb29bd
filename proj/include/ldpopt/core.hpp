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

// Distributions, channels, likelihood-ratio canonicalization and the
// divergences every other module is built on.
//
// Conventions:
//  * A channel from [k] to [l] is an l x k column-stochastic matrix stored
//    row-major; T(r, c) is the probability of output r given input c.
//  * hellinger_sq is the un-halved sum of (sqrt(p_i) - sqrt(q_i))^2, so it
//    ranges over [0, 2].

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ldpopt {

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Distribution {
 public:
  Distribution() = default;

  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw std::invalid_argument("distribution: alphabet size must be >= 1");
    }
    double sum = 0.0;
    for (double v : probs_) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument("distribution: negative or NaN entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("distribution: entries sum to " +
                                  std::to_string(sum) + ", expected 1");
    }
  }

  // Scales non-negative weights to sum to one.
  static Distribution Normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double v : weights) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument("distribution: negative or NaN weight");
      }
      sum += v;
    }
    if (!(sum > 0.0)) {
      throw std::invalid_argument("distribution: weights sum to zero");
    }
    for (double& v : weights) v /= sum;
    return Distribution(std::move(weights));
  }

  // Ber(p) is stored as (p, 1 - p).
  static Distribution Bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("bernoulli parameter outside [0, 1]");
    }
    return Distribution({p, 1.0 - p});
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  operator std::span<const double>() const { return probs_; }  // NOLINT
  const std::vector<double>& vector() const { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

class Channel {
 public:
  Channel() = default;

  // `row_major` holds output_size x input_size entries.
  Channel(std::size_t output_size, std::size_t input_size,
          std::vector<double> row_major)
      : rows_(output_size), cols_(input_size), data_(std::move(row_major)) {
    if (rows_ == 0 || cols_ == 0) {
      throw std::invalid_argument("channel: empty dimensions");
    }
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("channel: entry count does not match shape");
    }
    for (double v : data_) {
      if (!(v >= -kSumTolerance && v <= 1.0 + kSumTolerance)) {
        throw std::invalid_argument("channel: entry outside [0, 1]");
      }
    }
    for (std::size_t c = 0; c < cols_; ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) sum += (*this)(r, c);
      if (std::abs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument("channel: column " + std::to_string(c) +
                                    " sums to " + std::to_string(sum));
      }
    }
  }

  static Channel FromRows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
      throw std::invalid_argument("channel: empty matrix");
    }
    std::vector<double> data;
    for (const auto& row : rows) {
      if (row.size() != rows.front().size()) {
        throw std::invalid_argument("channel: ragged matrix");
      }
      data.insert(data.end(), row.begin(), row.end());
    }
    return Channel(rows.size(), rows.front().size(), std::move(data));
  }

  static Channel Identity(std::size_t k) {
    std::vector<double> data(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) data[i * k + i] = 1.0;
    return Channel(k, k, std::move(data));
  }

  // labels[c] is the output that input c is sent to.
  static Channel Deterministic(std::size_t output_size,
                               std::span<const int> labels) {
    std::vector<double> data(output_size * labels.size(), 0.0);
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (labels[c] < 0 || static_cast<std::size_t>(labels[c]) >= output_size) {
        throw std::invalid_argument("channel: label out of range");
      }
      data[static_cast<std::size_t>(labels[c]) * labels.size() + c] = 1.0;
    }
    return Channel(output_size, labels.size(), std::move(data));
  }

  // Every input goes to `row`.
  static Channel Constant(std::size_t output_size, std::size_t input_size,
                          std::size_t row = 0) {
    std::vector<int> labels(input_size, static_cast<int>(row));
    return Deterministic(output_size, labels);
  }

  std::size_t output_size() const { return rows_; }
  std::size_t input_size() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }
  const std::vector<double>& data() const { return data_; }

  bool IsDeterministic(double tol = kSumTolerance) const {
    for (double v : data_) {
      if (v > tol && v < 1.0 - tol) return false;
    }
    return true;
  }

  // Output label of each input; only meaningful for deterministic channels.
  std::vector<int> Labels(double tol = kSumTolerance) const {
    if (!IsDeterministic(tol)) {
      throw std::invalid_argument("channel is not deterministic");
    }
    std::vector<int> labels(cols_, -1);
    for (std::size_t c = 0; c < cols_; ++c) {
      for (std::size_t r = 0; r < rows_; ++r) {
        if ((*this)(r, c) >= 1.0 - tol) labels[c] = static_cast<int>(r);
      }
    }
    return labels;
  }

  friend bool operator==(const Channel&, const Channel&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Max absolute entry-wise difference; shapes must agree.
inline double MaxAbsDifference(const Channel& a, const Channel& b) {
  if (a.output_size() != b.output_size() || a.input_size() != b.input_size()) {
    return kInfinity;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

inline double MaxAbsDifference(std::span<const double> a,
                               std::span<const double> b) {
  if (a.size() != b.size()) return kInfinity;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

namespace detail {

inline void CheckSameSize(std::span<const double> p, std::span<const double> q,
                          const char* what) {
  if (p.size() != q.size()) {
    throw std::invalid_argument(std::string(what) + ": alphabet size mismatch");
  }
}

// T p without validation, written into `out` (size T.output_size()).
inline void ApplyInto(const Channel& t, std::span<const double> p,
                      std::span<double> out) {
  const std::size_t k = t.input_size();
  const double* data = t.data().data();
  for (std::size_t r = 0; r < t.output_size(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < k; ++c) acc += data[r * k + c] * p[c];
    out[r] = acc;
  }
}

}  // namespace detail

inline Distribution apply(const Channel& t, const Distribution& p) {
  if (t.input_size() != p.size()) {
    throw std::invalid_argument("apply: channel input size != alphabet size");
  }
  std::vector<double> out(t.output_size());
  detail::ApplyInto(t, p.probs(), out);
  // Renormalize away accumulated rounding; the result is a distribution by
  // construction.
  double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v = std::max(0.0, v / sum);
  return Distribution(std::move(out));
}

// Matrix product t2 x t1: first t1, then t2.
inline Channel compose(const Channel& t2, const Channel& t1) {
  if (t1.output_size() != t2.input_size()) {
    throw std::invalid_argument("compose: inner output size != outer input");
  }
  const std::size_t l = t2.output_size();
  const std::size_t m = t1.output_size();
  const std::size_t k = t1.input_size();
  std::vector<double> data(l * k, 0.0);
  for (std::size_t r = 0; r < l; ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = t2(r, j);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < k; ++c) data[r * k + c] += w * t1(j, c);
    }
  }
  for (double& v : data) v = std::clamp(v, 0.0, 1.0);
  return Channel(l, k, std::move(data));
}

// ---------------------------------------------------------------------------
// Divergences. All take equal-length probability vectors.

inline double tv(std::span<const double> p, std::span<const double> q) {
  detail::CheckSameSize(p, q, "tv");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

// (sqrt a - sqrt b)^2 computed as (a - b)^2 / (sqrt a + sqrt b)^2 so that
// nearby arguments do not cancel catastrophically.
inline double HellingerTerm(double a, double b) {
  const double s = std::sqrt(a) + std::sqrt(b);
  if (s == 0.0) return 0.0;
  const double d = (a - b) / s;
  return d * d;
}

inline double hellinger_sq(std::span<const double> p,
                           std::span<const double> q) {
  detail::CheckSameSize(p, q, "hellinger_sq");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += HellingerTerm(p[i], q[i]);
  return sum;
}

inline double kl(std::span<const double> p, std::span<const double> q) {
  detail::CheckSameSize(p, q, "kl");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInfinity;
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, sum);
}

// Renyi divergence of order alpha > 0. alpha == 1 is KL, alpha == +inf is
// the max log-likelihood ratio.
inline double renyi(std::span<const double> p, std::span<const double> q,
                    double alpha) {
  detail::CheckSameSize(p, q, "renyi");
  if (!(alpha > 0.0)) throw std::invalid_argument("renyi: alpha must be > 0");
  if (alpha == 1.0) return kl(p, q);
  if (std::isinf(alpha)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      if (q[i] == 0.0) return kInfinity;
      worst = std::max(worst, std::log(p[i] / q[i]));
    }
    return worst;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (alpha > 1.0) return kInfinity;
      continue;
    }
    sum += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (sum == 0.0) return kInfinity;  // alpha < 1 with disjoint supports
  return std::max(0.0, std::log(sum) / (alpha - 1.0));
}

// Chernoff information -min_{lambda in [0,1]} log sum p^lambda q^(1-lambda),
// by golden-section search on lambda (the objective is convex).
inline double chernoff_info(std::span<const double> p,
                            std::span<const double> q) {
  detail::CheckSameSize(p, q, "chernoff_info");
  auto log_affinity = [&](double lambda) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0 || q[i] == 0.0) continue;
      sum += std::pow(p[i], lambda) * std::pow(q[i], 1.0 - lambda);
    }
    return sum > 0.0 ? std::log(sum) : -kInfinity;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = log_affinity(x1), f2 = log_affinity(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = log_affinity(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = log_affinity(x2);
    }
  }
  const double best = std::min(f1, f2);
  return std::isinf(best) ? kInfinity : std::max(0.0, -best);
}

// ---------------------------------------------------------------------------
// Likelihood ratios on the extended real line.

// p_i / q_i with an explicit tag for +infinity (q_i == 0 < p_i).
struct ExtendedRatio {
  double value = 0.0;
  bool infinite = false;

  static ExtendedRatio Of(double p, double q) {
    if (q == 0.0) {
      if (p == 0.0) throw std::invalid_argument("likelihood ratio 0/0");
      return {0.0, true};
    }
    return {p / q, false};
  }

  friend std::partial_ordering operator<=>(const ExtendedRatio& a,
                                           const ExtendedRatio& b) {
    if (a.infinite || b.infinite) {
      return static_cast<int>(a.infinite) <=> static_cast<int>(b.infinite);
    }
    return a.value <=> b.value;
  }
  friend bool operator==(const ExtendedRatio& a, const ExtendedRatio& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
  }
};

// permutation[j] is the input at sorted position j; ratios[j] its ratio.
struct LikelihoodOrder {
  std::vector<int> permutation;
  std::vector<ExtendedRatio> ratios;

  std::size_t size() const { return permutation.size(); }

  static LikelihoodOrder Identity(std::size_t k) {
    LikelihoodOrder order;
    order.permutation.resize(k);
    std::iota(order.permutation.begin(), order.permutation.end(), 0);
    order.ratios.assign(k, ExtendedRatio{});
    return order;
  }
};

// Sorts inputs by p_i / q_i ascending; ties keep the original index order.
// Throws if some p_i == q_i == 0 (canonicalize the pair first).
inline LikelihoodOrder likelihood_order(std::span<const double> p,
                                        std::span<const double> q) {
  detail::CheckSameSize(p, q, "likelihood_order");
  std::vector<ExtendedRatio> ratio(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    ratio[i] = ExtendedRatio::Of(p[i], q[i]);
  }
  LikelihoodOrder order;
  order.permutation.resize(p.size());
  std::iota(order.permutation.begin(), order.permutation.end(), 0);
  std::stable_sort(order.permutation.begin(), order.permutation.end(),
                   [&](int a, int b) { return ratio[a] < ratio[b]; });
  for (int i : order.permutation) order.ratios.push_back(ratio[i]);
  return order;
}

// The pair with both-zero inputs dropped and equal-ratio inputs merged,
// listed in strictly increasing likelihood-ratio order.
struct PairCanonicalization {
  Distribution p;
  Distribution q;
  // merge_map[i] is the merged symbol of original input i. Inputs with
  // p_i == q_i == 0 go to symbol 0; they carry no mass under either
  // hypothesis.
  std::vector<int> merge_map;
  std::vector<ExtendedRatio> ratios;
  // True when every input shares one ratio (p == q); k' == 1.
  bool degenerate = false;

  std::size_t original_size() const { return merge_map.size(); }
  std::size_t size() const { return p.size(); }

  // The deterministic map T* from [k] to [k'].
  Channel MergeChannel() const {
    return Channel::Deterministic(p.size(), merge_map);
  }

  // A channel on the merged alphabet, pulled back to the original one.
  Channel Lift(const Channel& merged) const {
    return compose(merged, MergeChannel());
  }
};

inline PairCanonicalization canonicalize(const Distribution& p,
                                         const Distribution& q) {
  detail::CheckSameSize(p, q, "canonicalize");
  const std::size_t k = p.size();
  std::vector<int> support;
  for (std::size_t i = 0; i < k; ++i) {
    if (p[i] > 0.0 || q[i] > 0.0) support.push_back(static_cast<int>(i));
  }
  if (support.empty()) {
    throw std::invalid_argument("canonicalize: p and q are both zero");
  }
  std::stable_sort(support.begin(), support.end(), [&](int a, int b) {
    return ExtendedRatio::Of(p[a], q[a]) < ExtendedRatio::Of(p[b], q[b]);
  });
  auto same_ratio = [&](int a, int b) {
    const double lhs = p[a] * q[b];
    const double rhs = p[b] * q[a];
    return std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs) ||
           (q[a] == 0.0 && q[b] == 0.0);
  };

  PairCanonicalization out;
  out.merge_map.assign(k, 0);
  std::vector<double> merged_p, merged_q;
  int group_head = -1;
  for (int i : support) {
    if (group_head < 0 || !same_ratio(group_head, i)) {
      group_head = i;
      merged_p.push_back(0.0);
      merged_q.push_back(0.0);
    }
    merged_p.back() += p[i];
    merged_q.back() += q[i];
    out.merge_map[i] = static_cast<int>(merged_p.size()) - 1;
  }
  for (std::size_t j = 0; j < merged_p.size(); ++j) {
    out.ratios.push_back(ExtendedRatio::Of(merged_p[j], merged_q[j]));
  }
  out.p = Distribution::Normalized(std::move(merged_p));
  out.q = Distribution::Normalized(std::move(merged_q));
  out.degenerate = out.p.size() == 1;
  return out;
}

// Given T on the original alphabet, the channel T' on the merged alphabet
// with (T' p', T' q') == (T p, T q): each merged column is the p-weighted
// (or, when p' vanishes there, q-weighted) average of its members.
inline Channel ReduceToCanonical(const PairCanonicalization& canon,
                                 const Channel& t, const Distribution& p,
                                 const Distribution& q) {
  if (t.input_size() != canon.original_size()) {
    throw std::invalid_argument("ReduceToCanonical: input size mismatch");
  }
  const std::size_t l = t.output_size();
  const std::size_t kp = canon.size();
  std::vector<double> data(l * kp, 0.0);
  std::vector<double> weight(kp, 0.0);
  for (std::size_t i = 0; i < t.input_size(); ++i) {
    if (p[i] == 0.0 && q[i] == 0.0) continue;
    const int j = canon.merge_map[i];
    const double w = canon.p[j] > 0.0 ? p[i] : q[i];
    weight[j] += w;
    for (std::size_t r = 0; r < l; ++r) data[r * kp + j] += w * t(r, i);
  }
  for (std::size_t j = 0; j < kp; ++j) {
    for (std::size_t r = 0; r < l; ++r) data[r * kp + j] /= weight[j];
  }
  return Channel(l, kp, std::move(data));
}

}  // namespace ldpopt
