// Copyright 2026 The rutk Authors
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

#include "rutk/report.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rutk/error.h"

namespace rutk {

using ojson = nlohmann::ordered_json;

std::string FormatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

namespace {

// JSON number rounded to six significant digits; non-finite becomes null.
ojson Num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(FormatNumber(x).c_str(), nullptr);
}

ojson OptNum(const std::optional<double>& x) {
  return x ? Num(*x) : ojson(nullptr);
}

std::string JoinKeys(const std::vector<std::string>& keys, char sep) {
  std::string out;
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i) out.push_back(sep);
    out += keys[i];
  }
  return out;
}

SubjectResult Evaluate(const Dataset& orig, const SubjectInput& in,
                       const std::vector<KeyTargetConfig>& configs,
                       const RiskConfig& risk, const UtilityOptions& utility) {
  SubjectResult out;
  out.label = in.label;
  if (!in.load_error.empty() || !in.data) {
    out.error = in.load_error.empty() ? "no data" : in.load_error;
    return out;
  }
  try {
    out.n_rows = static_cast<int64_t>(in.data->n_rows());
    RequireSameSchema(orig, *in.data);
    out.risk = ComputeTcapColumn(orig, {in.label, in.data}, configs,
                                 risk.weap_threshold);
    out.utility = EvaluateUtility(orig, *in.data, utility);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

bool EvaluationReport::has_errors() const {
  for (const SubjectResult& s : subjects) {
    if (!s.ok) return true;
  }
  return false;
}

std::vector<RuMapPoint> EvaluationReport::RuMap(bool include_original) const {
  std::vector<RuMapPoint> points;
  if (include_original) points.push_back({"original", 1.0, 1.0, baseline_average});
  for (const SubjectResult& s : subjects) {
    if (!s.ok) continue;
    points.push_back({s.label, s.utility.overall, s.risk.grand_average, baseline_average});
  }
  return points;
}

std::string Fingerprint(const Dataset& ds) {
  const std::string bytes = ToCsvString(ds);
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvaluationReport BuildReport(const Dataset& orig,
                             const std::vector<SubjectInput>& subjects,
                             const RiskConfig& risk,
                             const UtilityOptions& utility, int jobs) {
  if (subjects.empty()) {
    throw Error(ErrorCode::kNoSubjects, "no synthetic datasets to evaluate");
  }
  for (size_t i = 0; i < subjects.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (subjects[i].label == subjects[j].label) {
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate subject label " + subjects[i].label);
      }
    }
  }
  EvaluationReport report;
  report.dataset_name = orig.schema().dataset_name();
  report.original_fingerprint = Fingerprint(orig);
  report.original_rows = static_cast<int64_t>(orig.n_rows());
  report.configs = risk.Cells();
  for (const KeyTargetConfig& cfg : report.configs) {
    ValidateKeyTarget(orig.schema(), cfg);
  }
  report.baselines = TargetBaselines(orig, report.configs);
  std::vector<double> b;
  for (const TargetBaseline& tb : report.baselines) b.push_back(tb.baseline);
  report.baseline_average = UnweightedMean(b);

  report.subjects.resize(subjects.size());
  const size_t workers =
      std::min(subjects.size(), static_cast<size_t>(std::max(1, jobs)));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < subjects.size(); i = next++) {
      report.subjects[i] = Evaluate(orig, subjects[i], report.configs, risk, utility);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return report;
}

std::string ReportToJson(const EvaluationReport& report) {
  ojson doc;
  doc["toolkit"] = {{"name", kToolkitName}, {"version", kToolkitVersion}};
  if (!report.timestamp.empty()) doc["timestamp"] = report.timestamp;
  doc["original"] = {{"dataset_name", report.dataset_name},
                     {"fingerprint", report.original_fingerprint},
                     {"n_rows", report.original_rows}};
  doc["config"] = ojson::parse(report.config_echo);
  doc["conventions"] = {
      {"baseline", "toolkit convention: sum of squared original marginal shares "
                   "of the target"},
      {"tcap_undefined", "records whose key tuple is absent from the original "
                         "are excluded from the mean"},
      {"integer_binning", "integer variables are cut into fixed-width bins "
                          "anchored at the schema minimum for ROE tables"},
      {"pmse_null", "expected null pMSE = (k-1)(1-c)^2 c / N for a main-effects "
                    "logistic propensity model with k parameters"},
      {"cio_models", "integer target: OLS; binary target: logistic on the second "
                     "category; other categorical: logistic on the original's "
                     "modal category"},
      {"std_diff", "toolkit convention: mean |b_orig - b_synth| / se_orig over "
                   "non-intercept coefficients"},
  };

  ojson baselines = ojson::array();
  for (const TargetBaseline& tb : report.baselines) {
    baselines.push_back({{"target", tb.target}, {"baseline", Num(tb.baseline)}});
  }
  doc["baselines"] = baselines;
  doc["baseline_average"] = Num(report.baseline_average);

  ojson subjects = ojson::array();
  for (const SubjectResult& s : report.subjects) {
    ojson item;
    item["label"] = s.label;
    if (!s.ok) {
      item["status"] = "error";
      item["error"] = s.error;
      subjects.push_back(std::move(item));
      continue;
    }
    item["status"] = "ok";
    item["n_rows"] = s.n_rows;
    ojson cells = ojson::array();
    for (const TcapResult& c : s.risk.cells) {
      ojson cell;
      cell["label"] = c.config.label;
      cell["target"] = c.config.target;
      cell["keys"] = c.config.keys;
      cell["tcap"] = Num(c.tcap);
      cell["n_weap1"] = c.n_weap1;
      cell["n_matched"] = c.n_matched;
      cell["n_undefined"] = c.n_undefined;
      cell["match_rate"] = Num(c.match_rate());
      cell["baseline"] = Num(c.baseline);
      cell["no_matches"] = c.no_matches;
      cells.push_back(std::move(cell));
    }
    item["risk"] = {{"cells", cells}, {"grand_average", Num(s.risk.grand_average)}};

    const UtilityReport& u = s.utility;
    ojson pmse = {{"pmse", Num(u.pmse.pmse)},
                  {"c", Num(u.pmse.c)},
                  {"k", u.pmse.k},
                  {"n", u.pmse.n},
                  {"expected_null", Num(u.pmse.expected_null)},
                  {"ratio", Num(u.pmse.ratio)},
                  {"log_ratio", Num(u.pmse.log_ratio)},
                  {"scaled", Num(u.pmse.scaled)},
                  {"model_converged", u.pmse.model_converged},
                  {"separation_detected", u.pmse.separation_detected}};
    ojson models = ojson::array();
    for (const CioModel& m : u.cio.per_model) {
      ojson mj = {{"target", m.target}, {"family", m.family}, {"response", m.response},
                  {"converged", m.converged}};
      if (m.converged) {
        mj["mean_cio"] = Num(m.mean_cio);
        mj["std_diff"] = Num(m.std_diff);
        mj["n_coefficients"] = m.n_coefficients;
      } else {
        mj["failure"] = m.failure;
      }
      models.push_back(std::move(mj));
    }
    ojson cio = {{"mean_cio", OptNum(u.cio.mean_cio)},
                 {"mean_std_diff", OptNum(u.cio.mean_std_diff)},
                 {"n_failed", u.cio.n_failed},
                 {"models", models}};
    item["utility"] = {{"roe_uni", Num(u.roe_uni)},
                       {"roe_bi", Num(u.roe_bi)},
                       {"pmse", pmse},
                       {"cio", cio},
                       {"overall", Num(u.overall)},
                       {"components_used", u.components_used}};
    item["ru_point"] = {{"utility", Num(u.overall)},
                        {"risk", Num(s.risk.grand_average)}};
    subjects.push_back(std::move(item));
  }
  doc["subjects"] = subjects;

  ojson map = ojson::array();
  for (const RuMapPoint& p : report.RuMap(true)) {
    map.push_back({{"label", p.label}, {"utility", Num(p.utility)}, {"risk", Num(p.risk)}});
  }
  doc["ru_map"] = map;
  return doc.dump(2) + "\n";
}

std::string TcapCsv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "label,target,n_keys,keys,tcap,n_weap1,n_matched,n_undefined,match_rate,"
         "baseline,no_matches\n";
  for (const SubjectResult& s : report.subjects) {
    if (!s.ok) continue;
    for (const TcapResult& c : s.risk.cells) {
      out << CsvEscape(s.label) << ',' << CsvEscape(c.config.target) << ','
          << c.config.keys.size() << ',' << CsvEscape(JoinKeys(c.config.keys, ';'))
          << ',' << FormatNumber(c.tcap) << ',' << c.n_weap1 << ',' << c.n_matched
          << ',' << c.n_undefined << ',' << FormatNumber(c.match_rate()) << ','
          << FormatNumber(c.baseline) << ',' << (c.no_matches ? "true" : "false")
          << '\n';
    }
    out << CsvEscape(s.label) << ",average,,," << FormatNumber(s.risk.grand_average)
        << ",,,,," << FormatNumber(report.baseline_average) << ",\n";
  }
  return out.str();
}

std::string UtilityCsv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "label,status,pmse,log_pmse_ratio,scaled_pmse,roe_uni,roe_bi,cio,"
         "std_diff,cio_failed,overall\n";
  for (const SubjectResult& s : report.subjects) {
    out << CsvEscape(s.label) << ',';
    if (!s.ok) {
      out << "error,,,,,,,,,\n";
      continue;
    }
    const UtilityReport& u = s.utility;
    out << "ok," << FormatNumber(u.pmse.pmse) << ',' << FormatNumber(u.pmse.log_ratio)
        << ',' << FormatNumber(u.pmse.scaled) << ',' << FormatNumber(u.roe_uni) << ','
        << FormatNumber(u.roe_bi) << ','
        << (u.cio.mean_cio ? FormatNumber(*u.cio.mean_cio) : "") << ','
        << (u.cio.mean_std_diff ? FormatNumber(*u.cio.mean_std_diff) : "") << ','
        << u.cio.n_failed << ',' << FormatNumber(u.overall) << '\n';
  }
  return out.str();
}

std::string RenderRuMapCsv(const std::vector<RuMapPoint>& points) {
  std::ostringstream out;
  out << "label,utility,risk,baseline\n";
  for (const RuMapPoint& p : points) {
    out << CsvEscape(p.label) << ',' << FormatNumber(p.utility) << ','
        << FormatNumber(p.risk) << ',' << FormatNumber(p.baseline_risk) << '\n';
  }
  return out.str();
}

std::vector<RuMapPoint> ParseRuMapCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  CsvReader reader(in);
  std::vector<std::string> rec;
  if (!reader.Next(rec) || rec.size() != 4 || rec[0] != "label") {
    throw Error(ErrorCode::kParseError, "R-U map CSV: bad header");
  }
  std::vector<RuMapPoint> points;
  while (reader.Next(rec)) {
    if (rec.size() != 4) {
      throw Error(ErrorCode::kParseError,
                  "R-U map CSV: row " + std::to_string(reader.record_number()));
    }
    points.push_back({rec[0], std::strtod(rec[1].c_str(), nullptr),
                      std::strtod(rec[2].c_str(), nullptr),
                      std::strtod(rec[3].c_str(), nullptr)});
  }
  return points;
}

namespace {

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string Fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string RenderRuMapSvg(const std::vector<RuMapPoint>& points,
                           double baseline_risk) {
  constexpr double kSize = 600;
  constexpr double kMargin = 70;
  constexpr double kPlot = kSize - 2 * kMargin;
  auto px = [&](double risk) { return kMargin + std::clamp(risk, 0.0, 1.0) * kPlot; };
  auto py = [&](double utility) {
    return kMargin + (1.0 - std::clamp(utility, 0.0, 1.0)) * kPlot;
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kSize / 2 << "\" y=\"30\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">Risk-utility map</text>\n";
  out << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << Fixed(px(0)) << "\" y1=\"" << Fixed(py(0)) << "\" x2=\""
      << Fixed(px(1)) << "\" y2=\"" << Fixed(py(0)) << "\"/>\n"
      << "<line x1=\"" << Fixed(px(0)) << "\" y1=\"" << Fixed(py(0)) << "\" x2=\""
      << Fixed(px(0)) << "\" y2=\"" << Fixed(py(1)) << "\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = i / 5.0;
    out << "<line x1=\"" << Fixed(px(t)) << "\" y1=\"" << Fixed(py(0)) << "\" x2=\""
        << Fixed(px(t)) << "\" y2=\"" << Fixed(py(0) + 5) << "\"/>\n"
        << "<line x1=\"" << Fixed(px(0) - 5) << "\" y1=\"" << Fixed(py(t)) << "\" x2=\""
        << Fixed(px(0)) << "\" y2=\"" << Fixed(py(t)) << "\"/>\n";
  }
  out << "</g>\n<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = i / 5.0;
    out << "<text x=\"" << Fixed(px(t)) << "\" y=\"" << Fixed(py(0) + 18)
        << "\" text-anchor=\"middle\">" << Fixed(t).substr(0, 3) << "</text>\n"
        << "<text x=\"" << Fixed(px(0) - 8) << "\" y=\"" << Fixed(py(t) + 4)
        << "\" text-anchor=\"end\">" << Fixed(t).substr(0, 3) << "</text>\n";
  }
  out << "</g>\n"
      << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
         "Risk (average TCAP)</text>\n"
      << "<text x=\"20\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
      << kSize / 2 << ")\">Utility (overall)</text>\n";
  out << "<line id=\"baseline\" x1=\"" << Fixed(px(baseline_risk)) << "\" y1=\""
      << Fixed(py(0)) << "\" x2=\"" << Fixed(px(baseline_risk)) << "\" y2=\""
      << Fixed(py(1)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n"
      << "<text x=\"" << Fixed(px(baseline_risk) + 4) << "\" y=\"" << Fixed(py(1) + 12)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"gray\">baseline "
      << FormatNumber(baseline_risk) << "</text>\n";
  out << "<g id=\"points\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const RuMapPoint& p : points) {
    const std::string x = Fixed(px(p.risk));
    const std::string y = Fixed(py(p.utility));
    out << "<circle class=\"point\" cx=\"" << x << "\" cy=\"" << y
        << "\" r=\"5\" fill=\"" << (p.label == "original" ? "black" : "steelblue")
        << "\"><title>" << XmlEscape(p.label) << " (risk " << FormatNumber(p.risk)
        << ", utility " << FormatNumber(p.utility) << ")</title></circle>\n"
        << "<text x=\"" << Fixed(px(p.risk) + 8) << "\" y=\"" << Fixed(py(p.utility) - 8)
        << "\">" << XmlEscape(p.label) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string EmitRuMap(const EvaluationReport& report, bool include_original,
                      RuMapFormat format) {
  const std::vector<RuMapPoint> points = report.RuMap(include_original);
  if (format == RuMapFormat::kCsv) return RenderRuMapCsv(points);
  return RenderRuMapSvg(points, report.baseline_average);
}

}  // namespace rutk
