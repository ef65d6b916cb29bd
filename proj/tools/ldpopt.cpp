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

// ldpopt: optimal channels, sample-complexity curves, constructions,
// simulation, extreme-point listings and property checks from the shell.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldpopt/construct.hpp"
#include "ldpopt/io.hpp"
#include "ldpopt/ldp.hpp"
#include "ldpopt/optimize.hpp"
#include "ldpopt/parallel.hpp"
#include "ldpopt/sim.hpp"
#include "ldpopt/threshold.hpp"
#include "suites.h"

namespace ldpopt::tools {
namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ReadJson(const std::string& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

DistributionPair ReadPair(const std::string& path) {
  return PairFromJson(ReadJson(path));
}

// Writes to `path`, or stdout when empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

void EmitJson(const std::string& path, const Json& j) {
  Emit(path, j.dump(2) + "\n");
}

// `log:start,stop,points` in e^eps space.
std::vector<double> ParseGrid(const std::string& spec) {
  const std::string prefix = "log:";
  if (spec.rfind(prefix, 0) != 0) {
    throw UsageError("eps grid must look like log:start,stop,points");
  }
  std::istringstream in(spec.substr(prefix.size()));
  in.imbue(std::locale::classic());
  double start = 0.0, stop = 0.0;
  int points = 0;
  char c1 = 0, c2 = 0;
  if (!(in >> start >> c1 >> stop >> c2 >> points) || c1 != ',' ||
      c2 != ',' || !(in >> std::ws).eof()) {
    throw UsageError("malformed eps grid: " + spec);
  }
  if (!(start >= 1.0)) throw UsageError("eps grid: e^eps must be >= 1");
  try {
    return LogGrid(start, stop, points);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Optional numeric flag: unset stays NaN.
struct Param {
  double value = std::numeric_limits<double>::quiet_NaN();
  CLI::Option* option = nullptr;

  bool set() const { return option != nullptr && option->count() > 0; }
};

void Forbid(const Param& p, const std::string& flag, const std::string& why) {
  if (p.set()) throw UsageError(flag + " is not valid " + why);
}

double Require(const Param& p, const std::string& flag,
               const std::string& why) {
  if (!p.set()) throw UsageError(flag + " is required " + why);
  return p.value;
}

void CheckEps(double eps) {
  if (!(eps >= 0.0)) throw UsageError("--eps must be >= 0");
}

void CheckDelta(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw UsageError("--delta must lie in [0, 1]");
  }
}

struct Common {
  int threads = 0;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string pair;
  std::string family = "ldp";
  std::string objective = "hellinger_sq";
  std::string out;
  int l = 2;
  Param eps, delta, alpha;
  CLI::Option* l_option = nullptr;
};

int RunOptimize(const OptimizeArgs& a) {
  const auto pair = ReadPair(a.pair);
  const int k = static_cast<int>(pair.p.size());
  Objective g;
  try {
    g = Objective::Parse(a.objective);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.l < 1) throw UsageError("--l must be >= 1");
  const std::string ctx = "for --family " + a.family;
  const bool l_set = a.l_option->count() > 0;
  OptResult result;
  if (a.family == "comm") {
    Forbid(a.eps, "--eps", ctx);
    Forbid(a.delta, "--delta", ctx);
    Forbid(a.alpha, "--alpha", ctx);
    result = maximize_comm(pair.p, pair.q, a.l, g);
  } else if (a.family == "ldp") {
    Forbid(a.delta, "--delta", ctx);
    Forbid(a.alpha, "--alpha", ctx);
    const double eps = Require(a.eps, "--eps", ctx);
    CheckEps(eps);
    result = maximize_private(pair.p, pair.q, pure_ldp_family(k, a.l, eps), g);
  } else if (a.family == "sldp") {
    Forbid(a.alpha, "--alpha", ctx);
    const double eps = Require(a.eps, "--eps", ctx);
    const double delta = Require(a.delta, "--delta", ctx);
    CheckEps(eps);
    CheckDelta(delta);
    result =
        maximize_private(pair.p, pair.q, sldp_family(k, a.l, eps, delta), g);
  } else if (a.family == "approx2") {
    Forbid(a.alpha, "--alpha", ctx);
    if (l_set && a.l != 2) throw UsageError("--family approx2 has l = 2");
    const double eps = Require(a.eps, "--eps", ctx);
    const double delta = Require(a.delta, "--delta", ctx);
    CheckEps(eps);
    CheckDelta(delta);
    result = maximize_private(pair.p, pair.q,
                              approx_binary_family(k, eps, delta), g);
  } else {  // rdp
    Forbid(a.delta, "--delta", ctx);
    if (l_set && a.l != 2) throw UsageError("--family rdp has l = 2");
    const double eps = Require(a.eps, "--eps", ctx);
    const double alpha = Require(a.alpha, "--alpha", ctx);
    CheckEps(eps);
    if (!(alpha > 0.0)) throw UsageError("--alpha must be > 0");
    result = rdp_binary_optimize(pair.p, pair.q, eps, alpha, g);
  }
  Json j = OptResultToJson(result);
  j["family"] = a.family;
  j["objective"] = g.Name();
  EmitJson(a.out, j);
  return kExitPass;
}

// ---------------------------------------------------------------------------

struct CurveArgs {
  double rho = 0.0;
  double nu = 0.0;
  std::string grid;
  std::string out;
  bool binary = false;
  int l = 3;
};

int RunCurve(const CurveArgs& a) {
  const auto e_eps = ParseGrid(a.grid);
  if (a.l < 2) throw UsageError("--l must be >= 2");
  const auto pair =
      a.binary ? binary_pair(a.rho, a.nu) : worst_case_pair(a.rho, a.nu);
  const auto curve = complexity_curve(pair.p, pair.q, e_eps, a.l);
  std::ostringstream csv;
  WriteCurveCsv(csv, curve);
  Emit(a.out, csv.str());
  return kExitPass;
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
  std::string kind;
  std::string pair;
  std::string out;
  Param rho, nu, eps, delta;
  int l = 2;
};

Json ImageSummary(const Channel& t, const DistributionPair& pair) {
  const auto tp = apply(t, pair.p);
  const auto tq = apply(t, pair.q);
  return Json{{"channel", ChannelToJson(t)},
              {"hellinger_sq", hellinger_sq(tp, tq)},
              {"tv", tv(tp, tq)},
              {"input_hellinger_sq", hellinger_sq(pair.p, pair.q)},
              {"input_tv", tv(pair.p, pair.q)}};
}

int RunConstruct(const ConstructArgs& a) {
  const std::string ctx = "for --kind " + a.kind;
  if (a.kind == "worst-case" || a.kind == "binary-pair") {
    if (!a.pair.empty()) throw UsageError("--pair is not valid " + ctx);
    const double rho = Require(a.rho, "--rho", ctx);
    const double nu = Require(a.nu, "--nu", ctx);
    const auto made =
        a.kind == "worst-case" ? worst_case_pair(rho, nu) : binary_pair(rho, nu);
    Json j = PairToJson(made.p, made.q);
    j["tv"] = tv(made.p, made.q);
    j["hellinger_sq"] = hellinger_sq(made.p, made.q);
    EmitJson(a.out, j);
    return kExitPass;
  }
  if (a.pair.empty()) throw UsageError("--pair is required " + ctx);
  Forbid(a.rho, "--rho", ctx);
  Forbid(a.nu, "--nu", ctx);
  const auto pair = ReadPair(a.pair);
  Json j;
  if (a.kind == "reduce") {
    Forbid(a.eps, "--eps", ctx);
    Forbid(a.delta, "--delta", ctx);
    const auto r = reduce_channel(pair.p, pair.q, a.l);
    j = ImageSummary(r.channel, pair);
    j["branch"] = BranchName(r.branch);
    EmitJson(a.out, j);
    return kExitPass;
  }
  const double eps = Require(a.eps, "--eps", ctx);
  CheckEps(eps);
  if (a.kind != "approx-ldp") Forbid(a.delta, "--delta", ctx);
  if (a.kind == "sdpi") {
    const auto r = sdpi_binary(pair.p, pair.q, eps);
    j = ImageSummary(r.channel, pair);
    j["tv_identity"] = r.tv_identity;
  } else if (a.kind == "minimax") {
    j = ImageSummary(minimax_channel(pair.p, pair.q, eps), pair);
  } else if (a.kind == "free-privacy") {
    j = ImageSummary(free_privacy_channel(pair.p, pair.q, eps), pair);
  } else {  // approx-ldp
    const double delta = Require(a.delta, "--delta", ctx);
    CheckDelta(delta);
    j = ImageSummary(approx_ldp_channel(pair.p, pair.q, eps, delta), pair);
  }
  EmitJson(a.out, j);
  return kExitPass;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string pair;
  std::string channel;
  std::string out;
  std::int64_t n = 0;
  bool find_n = false;
  int trials = 2000;
  double target = 0.1;
};

int RunSimulate(const SimulateArgs& a, const Common& common) {
  const auto pair = ReadPair(a.pair);
  const auto t = a.channel.empty() ? Channel::Identity(pair.p.size())
                                   : ChannelFromJson(ReadJson(a.channel));
  if (t.input_size() != pair.p.size()) {
    throw UsageError("channel input size does not match the pair");
  }
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  Json j{{"hellinger_sq", hellinger_sq(apply(t, pair.p), apply(t, pair.q))},
         {"seed", common.seed}};
  if (a.find_n) {
    if (a.n != 0) throw UsageError("--n and --find-n are exclusive");
    if (!(a.target > 0.0 && a.target < 1.0)) {
      throw UsageError("--target must lie in (0, 1)");
    }
    j["n"] = find_sample_size(pair.p, pair.q, t, a.target, a.trials,
                              common.seed);
    j["target"] = a.target;
    j["trials"] = a.trials;
    EmitJson(a.out, j);
    return kExitPass;
  }
  if (a.n < 1) throw UsageError("--n >= 1 or --find-n is required");
  const auto r = run_protocol({pair.p, pair.q, t, a.n, a.trials, common.seed});
  j["n"] = a.n;
  j["trials"] = r.trials;
  j["type1"] = r.type1;
  j["type2"] = r.type2;
  j["sum"] = r.sum;
  j["half_width"] = r.half_width;
  if (t.output_size() == 2) {
    j["exact_sum"] = exact_binary_lrt_error(pair.p, pair.q, t, a.n);
  }
  EmitJson(a.out, j);
  return kExitPass;
}

// ---------------------------------------------------------------------------

struct EnumerateArgs {
  std::string family = "ldp";
  std::string pair;
  std::string out;
  int k = 2;
  int l = 2;
  Param eps, delta;
  bool dedupe = false;
  bool count_only = false;
};

int RunEnumerate(const EnumerateArgs& a) {
  if (a.k < 1 || a.l < 1) throw UsageError("--k and --l must be >= 1");
  const std::string ctx = "for --family " + a.family;
  std::vector<Channel> channels;
  if (a.family == "comm") {
    Forbid(a.eps, "--eps", ctx);
    Forbid(a.delta, "--delta", ctx);
    auto order = LikelihoodOrder::Identity(a.k);
    if (!a.pair.empty()) {
      const auto pair = ReadPair(a.pair);
      if (pair.p.size() != static_cast<std::size_t>(a.k)) {
        throw UsageError("--k does not match the pair");
      }
      order = likelihood_order(pair.p, pair.q);
    }
    channels = enumerate_threshold(a.k, a.l, order);
  } else {
    if (!a.pair.empty()) throw UsageError("--pair is only used with comm");
    const double eps = Require(a.eps, "--eps", ctx);
    CheckEps(eps);
    LpFamily f;
    if (a.family == "ldp") {
      Forbid(a.delta, "--delta", ctx);
      f = pure_ldp_family(a.k, a.l, eps);
    } else {
      const double delta = Require(a.delta, "--delta", ctx);
      CheckDelta(delta);
      if (a.family == "approx2") {
        if (a.l != 2) throw UsageError("--family approx2 has l = 2");
        f = approx_binary_family(a.k, eps, delta);
      } else {
        f = sldp_family(a.k, a.l, eps, delta);
      }
    }
    channels = ExtremePoints(f, a.dedupe);
  }
  Json j{{"family", a.family}, {"k", a.k}, {"l", a.l},
         {"count", channels.size()}};
  if (!a.count_only) {
    Json list = Json::array();
    for (const auto& t : channels) list.push_back(ChannelToJson(t));
    j["channels"] = std::move(list);
  }
  EmitJson(a.out, j);
  return kExitPass;
}

// ---------------------------------------------------------------------------

int RunVerify(const std::string& suite, const Common& common) {
  const auto checks = Suites().at(suite)(common.seed);
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << suite << ": " << c.name
              << " (" << c.detail << ")\n";
    all = all && c.passed;
  }
  std::cout << suite << ": " << (all ? "PASS" : "FAIL") << "\n";
  return all ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

void AddParam(CLI::App* app, const std::string& flag, Param& p,
              const std::string& help) {
  p.option = app->add_option(flag, p.value, help);
}

int Main(int argc, char** argv) {
  CLI::App app{"Optimal privatization channels for binary hypothesis testing"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads,
                 "worker cap (default: LDPOPT_THREADS, then all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", common.seed, "base seed for randomized commands");

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "best channel in a family");
  optimize->add_option("--pair", opt.pair, "JSON pair file")->required();
  optimize->add_option("--family", opt.family, "constraint family")
      ->check(CLI::IsMember({"comm", "ldp", "sldp", "approx2", "rdp"}));
  AddParam(optimize, "--eps", opt.eps, "privacy level");
  AddParam(optimize, "--delta", opt.delta, "approximate-privacy slack");
  AddParam(optimize, "--alpha", opt.alpha, "Renyi order (rdp)");
  opt.l_option = optimize->add_option("--l", opt.l, "output alphabet size");
  optimize->add_option("--objective", opt.objective,
                       "hellinger_sq, tv, kl, chernoff or renyi:<alpha>");
  optimize->add_option("--out", opt.out, "output file (default stdout)");

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "sample-complexity proxy curve");
  curve->add_option("--rho", curve_args.rho, "squared Hellinger distance")
      ->required();
  curve->add_option("--nu", curve_args.nu, "total variation distance")
      ->required();
  curve->add_option("--eps-grid", curve_args.grid, "log:start,stop,points")
      ->required();
  curve->add_option("--out", curve_args.out, "CSV file (default stdout)");
  curve->add_flag("--binary", curve_args.binary,
                  "binary pair with the same distances");
  curve->add_option("--l", curve_args.l, "output alphabet size");

  ConstructArgs con;
  auto* construct = app.add_subcommand("construct", "explicit constructions");
  construct->add_option("--kind", con.kind, "construction")
      ->required()
      ->check(CLI::IsMember({"worst-case", "binary-pair", "sdpi", "minimax",
                             "free-privacy", "approx-ldp", "reduce"}));
  construct->add_option("--pair", con.pair, "JSON pair file");
  AddParam(construct, "--rho", con.rho, "squared Hellinger distance");
  AddParam(construct, "--nu", con.nu, "total variation distance");
  AddParam(construct, "--eps", con.eps, "privacy level");
  AddParam(construct, "--delta", con.delta, "approximate-privacy slack");
  construct->add_option("--l", con.l, "output alphabet size (reduce)");
  construct->add_option("--out", con.out, "output file (default stdout)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo test error");
  simulate->add_option("--pair", sim.pair, "JSON pair file")->required();
  simulate->add_option("--channel", sim.channel,
                       "JSON channel file (default identity)");
  simulate->add_option("--n", sim.n, "samples per trial");
  simulate->add_flag("--find-n", sim.find_n,
                     "search for the smallest adequate n");
  simulate->add_option("--trials", sim.trials, "Monte Carlo trials");
  simulate->add_option("--target", sim.target, "error target for --find-n");
  simulate->add_option("--out", sim.out, "output file (default stdout)");

  EnumerateArgs en;
  auto* enumerate = app.add_subcommand("enumerate", "list extreme channels");
  enumerate->add_option("--family", en.family, "constraint family")
      ->check(CLI::IsMember({"comm", "ldp", "sldp", "approx2"}));
  enumerate->add_option("--k", en.k, "input alphabet size");
  enumerate->add_option("--l", en.l, "output alphabet size");
  AddParam(enumerate, "--eps", en.eps, "privacy level");
  AddParam(enumerate, "--delta", en.delta, "approximate-privacy slack");
  enumerate->add_option("--pair", en.pair,
                        "pair fixing the likelihood order (comm)");
  enumerate->add_flag("--dedupe", en.dedupe, "drop row permutations");
  enumerate->add_flag("--count-only", en.count_only, "print only the count");
  enumerate->add_option("--out", en.out, "output file (default stdout)");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property battery");
  std::vector<std::string> names;
  for (const auto& [name, unused] : Suites()) names.push_back(name);
  verify->add_option("--suite", suite, "battery name")
      ->required()
      ->check(CLI::IsMember(names));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  if (common.threads > 0) SetThreadCount(common.threads);

  try {
    if (*optimize) return RunOptimize(opt);
    if (*curve) return RunCurve(curve_args);
    if (*construct) return RunConstruct(con);
    if (*simulate) return RunSimulate(sim, common);
    if (*enumerate) return RunEnumerate(en);
    return RunVerify(suite, common);
  } catch (const std::exception& e) {
    std::cerr << "ldpopt: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace
}  // namespace ldpopt::tools

int main(int argc, char** argv) { return ldpopt::tools::Main(argc, argv); }
