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

// JSON and CSV encodings.
//   pair:    {"p": [...], "q": [...]}
//   channel: {"matrix": [[row 0], [row 1], ...]}
//   family:  {"gamma": [...], "nu": [...], "k": K, "l": L}
//   curve:   CSV with header eps,e_eps,n_hat,certificate

#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldpopt/construct.hpp"
#include "ldpopt/core.hpp"
#include "ldpopt/ldp.hpp"
#include "ldpopt/optimize.hpp"

namespace ldpopt {

using Json = nlohmann::json;

// 17 significant digits in the C locale.
inline std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

inline Json PairToJson(const Distribution& p, const Distribution& q) {
  return Json{{"p", p.vector()}, {"q", q.vector()}};
}

inline DistributionPair PairFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("q")) {
    throw std::invalid_argument("pair JSON needs \"p\" and \"q\"");
  }
  Distribution p(j.at("p").get<std::vector<double>>());
  Distribution q(j.at("q").get<std::vector<double>>());
  if (p.size() != q.size()) {
    throw std::invalid_argument("pair JSON: p and q differ in length");
  }
  return {std::move(p), std::move(q)};
}

inline Json ChannelToJson(const Channel& t) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < t.output_size(); ++r) {
    rows.push_back(std::vector<double>(t.row(r).begin(), t.row(r).end()));
  }
  return Json{{"matrix", rows}};
}

inline Channel ChannelFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("matrix")) {
    throw std::invalid_argument("channel JSON needs \"matrix\"");
  }
  return Channel::FromRows(
      j.at("matrix").get<std::vector<std::vector<double>>>());
}

inline Json FamilyToJson(const LpFamily& f) {
  return Json{{"gamma", f.gamma}, {"nu", f.nu}, {"k", f.k}, {"l", f.l}};
}

inline LpFamily FamilyFromJson(const Json& j) {
  LpFamily f{j.at("gamma").get<std::vector<double>>(),
             j.at("nu").get<std::vector<double>>(), j.at("k").get<int>(),
             j.at("l").get<int>()};
  f.Validate();
  return f;
}

inline Json OptResultToJson(const OptResult& r) {
  Json cert{{"kind", r.certificate.kind == Certificate::Kind::kThreshold
                         ? "threshold"
                         : "decomposition"},
            {"cuts", r.certificate.cuts},
            {"inner", ChannelToJson(r.certificate.inner)},
            {"outer", ChannelToJson(r.certificate.outer)},
            {"summary", r.certificate.Describe()}};
  if (r.certificate.kind == Certificate::Kind::kDecomposition) {
    cert["outer_index"] = r.certificate.outer_index;
  }
  return Json{{"channel", ChannelToJson(r.channel)},
              {"value", std::isfinite(r.value) ? Json(r.value)
                                               : Json(FormatDouble(r.value))},
              {"certificate", cert}};
}

inline void WriteCurveCsv(std::ostream& os,
                          const std::vector<CurvePoint>& curve) {
  os << "eps,e_eps,n_hat,certificate\n";
  for (const auto& pt : curve) {
    os << FormatDouble(pt.eps) << ',' << FormatDouble(pt.e_eps) << ','
       << FormatDouble(pt.n_hat) << ',' << pt.certificate << '\n';
  }
}

inline std::vector<CurvePoint> ReadCurveCsv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line != "eps,e_eps,n_hat,certificate") {
    throw std::invalid_argument("curve CSV: unexpected header");
  }
  std::vector<CurvePoint> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        throw std::invalid_argument("curve CSV: short row");
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    cells.push_back(line.substr(start));
    auto parse = [](const std::string& s) {
      if (s == "inf") return kInfinity;
      std::istringstream in(s);
      in.imbue(std::locale::classic());
      double v = 0.0;
      in >> v;
      return v;
    };
    out.push_back({parse(cells[0]), parse(cells[1]), parse(cells[2]),
                   cells[3]});
  }
  return out;
}

}  // namespace ldpopt
