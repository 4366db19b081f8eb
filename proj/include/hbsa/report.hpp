// Copyright 2026 The hbsa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text and JSON renderings of distributions, tables, staged states and
// verification reports. Field order is fixed; docs/report-schema.json
// describes the JSON shapes.

#pragma once

#include <sstream>
#include <string>

#include "json.hpp"

#include "hbsa/bsa.hpp"

namespace hbsa {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Distributions.

inline Json to_json(const OutcomeDistribution& d) {
  Json records = Json::array();
  for (std::size_t i = 0; i < d.patterns().size(); ++i) {
    const auto& p = d.patterns()[i];
    records.push_back({{"detector_a", to_string(p.a)},
                       {"detector_b", to_string(p.b)},
                       {"probability", format_probability(d.probabilities()[i])}});
  }
  return Json{{"origins_a", d.origins(Photon::A)}, {"origins_b", d.origins(Photon::B)}, {"records", records}};
}

/// One line per pattern above `threshold`, in enumeration order.
inline std::string to_text(const OutcomeDistribution& d, double threshold = 1e-12) {
  std::ostringstream os;
  for (std::size_t i = 0; i < d.patterns().size(); ++i) {
    if (d.probabilities()[i] <= threshold) continue;
    os << to_string(d.patterns()[i]) << "  " << format_probability(d.probabilities()[i]) << "\n";
  }
  return os.str();
}

// Classification table.

inline Json to_json(const ClassificationTable& t) {
  Json rows = Json::array();
  for (const auto& p : enumerate_patterns(t.origins(Photon::A), t.origins(Photon::B))) {
    std::string label;
    try {
      label = std::string(to_string(t.classify(p)));
    } catch (const Error&) {
      label = "";
    }
    rows.push_back({{"pattern", to_string(p)}, {"label", label}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"origins_a", t.origins(Photon::A)},
              {"origins_b", t.origins(Photon::B)},
              {"rows", rows}};
}

/// Inverse of to_json(ClassificationTable). Throws MalformedPattern.
inline ClassificationTable table_from_json(const Json& j) {
  try {
    std::vector<ClassificationTable::Entry> entries;
    for (const auto& row : j.at("rows")) {
      const auto label = parse_bell_label(row.at("label").get<std::string>());
      if (!label) throw Error(ErrorKind::MalformedPattern, "unknown label in table row");
      entries.emplace_back(parse_pattern(row.at("pattern").get<std::string>()), *label);
    }
    return ClassificationTable(j.at("origins_a").get<std::vector<std::string>>(),
                               j.at("origins_b").get<std::vector<std::string>>(), std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedPattern, std::string("bad table document: ") + e.what());
  }
}

/// "<pattern>\t<label>" per row, enumeration order.
inline std::string to_text(const ClassificationTable& t) {
  std::ostringstream os;
  for (const auto& p : enumerate_patterns(t.origins(Photon::A), t.origins(Photon::B)))
    os << to_string(p) << "\t" << to_string(t.classify(p)) << "\n";
  return os.str();
}

// Staged states.

inline Json state_json(const TwoPhotonState& s) {
  Json terms = Json::array();
  for (const auto& [pair, amp] : s.amplitudes()) {
    terms.push_back({{"mode_a", s.space().describe(pair.a)},
                     {"mode_b", s.space().describe(pair.b)},
                     {"re", amp.real()},
                     {"im", amp.imag()}});
  }
  return terms;
}

inline Json to_json(const std::vector<StageSnapshot>& snaps, BellLabel label, Impl impl) {
  Json stages = Json::array();
  for (const auto& s : snaps) {
    stages.push_back({{"checkpoint", to_string(s.checkpoint)},
                      {"stage", s.stage},
                      {"fidelity", format_probability(s.fidelity)},
                      {"terms", state_json(s.state)}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"input", to_string(label)},
              {"impl", to_string(impl)},
              {"stages", stages}};
}

inline std::string to_text(const std::vector<StageSnapshot>& snaps) {
  std::ostringstream os;
  for (const auto& s : snaps) {
    os << "== " << to_string(s.checkpoint) << " (stage " << s.stage
       << ") fidelity " << format_probability(s.fidelity) << "\n";
    for (const auto& [pair, amp] : s.state.amplitudes()) {
      os << "  " << format_amplitude(amp) << " " << s.state.space().describe(pair.a) << "_A "
         << s.state.space().describe(pair.b) << "_B\n";
    }
  }
  return os.str();
}

// Verification.

inline Json to_json(const VerificationReport& r) {
  Json labels = Json::array();
  for (const auto& lr : r.labels) {
    Json support = Json::array();
    for (const auto& p : lr.support) support.push_back(to_string(p));
    Json fids = Json::object();
    for (const auto& [cp, f] : lr.stage_fidelities) fids[std::string(to_string(cp))] = format_probability(f);
    labels.push_back({{"label", to_string(lr.label)},
                      {"support", support},
                      {"min_probability", format_probability(lr.min_probability)},
                      {"max_probability", format_probability(lr.max_probability)},
                      {"mass_outside_row", format_probability(lr.mass_outside_row)},
                      {"total", format_probability(lr.total)},
                      {"success", format_probability(lr.success)},
                      {"path_sector_ok", lr.path_sector_ok},
                      {"stage_fidelities", fids}});
  }
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  Json mismatched = Json::array();
  for (const auto& p : r.mismatched) mismatched.push_back(to_string(p));
  return Json{{"schema_version", kSchemaVersion},
              {"impl", to_string(r.impl)},
              {"lmax", r.lmax},
              {"pass", r.pass()},
              {"table", {{"sizes_ok", r.table.sizes_ok}, {"disjoint", r.table.disjoint}, {"covering", r.table.covering}}},
              {"success_probability", format_probability(r.success_probability)},
              {"accuracy", {{"hits", r.accuracy_hits}, {"total", r.accuracy_total}, {"mismatched", mismatched}}},
              {"oracle_residual", format_probability(r.oracle_residual)},
              {"labels", labels},
              {"checks", checks}};
}

inline std::string to_text(const VerificationReport& r) {
  std::ostringstream os;
  os << "impl: " << to_string(r.impl) << "\n";
  os << "lmax: " << r.lmax << "\n";
  os << "table_disjoint: " << (r.table.disjoint ? "yes" : "no") << "\n";
  os << "table_covering: " << (r.table.covering ? "yes" : "no") << "\n";
  for (const auto& lr : r.labels) {
    os << "label " << to_string(lr.label) << ": support " << lr.support.size() << ", min "
       << format_probability(lr.min_probability) << ", max " << format_probability(lr.max_probability)
       << ", outside " << format_probability(lr.mass_outside_row) << ", success " << format_probability(lr.success)
       << "\n";
  }
  os << "accuracy: " << r.accuracy_hits << "/" << r.accuracy_total << "\n";
  os << "oracle_residual: " << format_probability(r.oracle_residual) << "\n";
  os << "success_probability: " << format_probability(r.success_probability) << "\n";
  for (const auto& c : r.checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  os << "result: " << (r.pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

// Circuits.

inline Json to_json(const Circuit& c) {
  Json stages = Json::array();
  for (std::size_t i = 0; i < c.stages.size(); ++i) {
    const Stage& s = c.stages[i];
    Json j{{"index", i}, {"kind", keyword(s.kind)}, {"photon", to_string(s.photon)}, {"paths", s.paths}};
    if (s.angle) j["angle"] = detail::print_angle(*s.angle);
    if (s.pol) j["pol"] = to_string(*s.pol);
    if (s.oam) j["oam"] = *s.oam;
    if (s.twice_q) j["q"] = detail::format_half_integer(*s.twice_q);
    if (s.shift) j["l"] = *s.shift;
    if (s.aux) j["aux"] = *s.aux;
    if (!s.ports.empty()) j["ports"] = s.ports;
    if (s.impl) j["impl"] = to_string(*s.impl);
    stages.push_back(j);
  }
  Json photons = Json::array();
  for (Photon p : c.photons) photons.push_back(to_string(p));
  return Json{{"schema_version", kSchemaVersion},
              {"name", c.name},
              {"description", c.description},
              {"lmax", c.lmax},
              {"paths", c.paths},
              {"photons", photons},
              {"stages", stages},
              {"text", to_text(c)}};
}

inline Json to_json(const ValidationReport& v) {
  Json findings = Json::array();
  for (const auto& f : v.findings) {
    findings.push_back({{"severity", to_string(f.severity)},
                        {"stage", f.stage},
                        {"kind", f.kind ? std::string(to_string(*f.kind)) : std::string()},
                        {"message", f.message}});
  }
  return Json{{"ok", v.ok()}, {"max_abs_oam", v.max_abs_oam}, {"findings", findings}};
}

}  // namespace hbsa
