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

// The polarization Bell-state analyzer end to end: input preparation,
// reference states after each stage group, the detector classification
// table, and the verification report.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hbsa/circuit_io.hpp"
#include "hbsa/oracle.hpp"

namespace hbsa {

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellLabel, 4> kBellLabels{BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus,
                                                      BellLabel::PsiMinus};

inline std::string_view to_string(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return "PhiPlus";
    case BellLabel::PhiMinus: return "PhiMinus";
    case BellLabel::PsiPlus: return "PsiPlus";
    case BellLabel::PsiMinus: return "PsiMinus";
  }
  return "?";
}

/// Command-line spelling: phi+, phi-, psi+, psi-.
inline std::string_view short_name(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PsiMinus: return "psi-";
  }
  return "?";
}

/// Accepts either spelling.
inline std::optional<BellLabel> parse_bell_label(std::string_view s) {
  for (BellLabel b : kBellLabels)
    if (s == to_string(b) || s == short_name(b)) return b;
  return std::nullopt;
}

inline bool is_phi(BellLabel b) { return b == BellLabel::PhiPlus || b == BellLabel::PhiMinus; }

/// Paths of the analyzer's two input arms.
struct ArmPaths {
  std::string a1 = "a1", b1 = "b1", a2 = "a2", b2 = "b2";
};

/// Bell polarization state at l = 0 on both photons, times
/// (|a1>|a2> + |b1>|b2>)/sqrt2.
inline TwoPhotonState prepare_input(BellLabel label, const SpacePtr& space, const ArmPaths& arms = {}) {
  const Polarization H = Polarization::H, V = Polarization::V;
  const double sign = (label == BellLabel::PhiMinus || label == BellLabel::PsiMinus) ? -1.0 : 1.0;
  const bool phi = is_phi(label);
  TwoPhotonState::Map amps;
  for (const auto& [pa, pb] : {std::pair{arms.a1, arms.a2}, std::pair{arms.b1, arms.b2}}) {
    const BasisMode ha = make_mode(*space, H, 0, pa), va = make_mode(*space, V, 0, pa);
    const BasisMode hb = make_mode(*space, H, 0, pb), vb = make_mode(*space, V, 0, pb);
    amps[{ha, phi ? hb : vb}] += 0.5;
    amps[{va, phi ? vb : hb}] += 0.5 * sign;
  }
  return TwoPhotonState(space, std::move(amps));
}

/// Points at which the staged evolution is compared with reference states.
enum class Checkpoint { AfterPCos, AfterOCps, AfterDpStage, AfterOh, AfterHwp };

inline constexpr std::array<Checkpoint, 5> kCheckpoints{Checkpoint::AfterPCos, Checkpoint::AfterOCps,
                                                        Checkpoint::AfterDpStage, Checkpoint::AfterOh,
                                                        Checkpoint::AfterHwp};

inline std::string_view to_string(Checkpoint c) {
  switch (c) {
    case Checkpoint::AfterPCos: return "after p_cos";
    case Checkpoint::AfterOCps: return "after o_cps";
    case Checkpoint::AfterDpStage: return "after dp_stage";
    case Checkpoint::AfterOh: return "after oh";
    case Checkpoint::AfterHwp: return "after hwp";
  }
  return "?";
}

namespace detail {

// Reference states. Each term is <sign><pol A><l A><pol B><l B>; the path
// factor is P for (a1 a2 + b1 b2) and X for (a1 b2 + b1 a2). Overall
// normalization is applied after expansion.
struct ReferenceEntry {
  Checkpoint checkpoint;
  BellLabel label;
  char path_factor;
  std::string_view terms;
};

inline constexpr ReferenceEntry kReferenceStates[] = {
    {Checkpoint::AfterPCos, BellLabel::PhiPlus, 'P', "+H+1H+1 +V-1V-1"},
    {Checkpoint::AfterPCos, BellLabel::PhiMinus, 'P', "+H+1H+1 -V-1V-1"},
    {Checkpoint::AfterPCos, BellLabel::PsiPlus, 'P', "+H+1V-1 +V-1H+1"},
    {Checkpoint::AfterPCos, BellLabel::PsiMinus, 'P', "+H+1V-1 -V-1H+1"},

    {Checkpoint::AfterOCps, BellLabel::PhiPlus, 'P', "+H+1H+1 +V-1V-1"},
    {Checkpoint::AfterOCps, BellLabel::PhiMinus, 'P', "+H+1H+1 -V-1V-1"},
    {Checkpoint::AfterOCps, BellLabel::PsiPlus, 'X', "+H+1V-1 +V-1H+1"},
    {Checkpoint::AfterOCps, BellLabel::PsiMinus, 'X', "+H+1V-1 -V-1H+1"},

    {Checkpoint::AfterDpStage, BellLabel::PhiPlus, 'P', "+H+1H-1 +V-1V+1"},
    {Checkpoint::AfterDpStage, BellLabel::PhiMinus, 'P', "+H+1H-1 -V-1V+1"},
    {Checkpoint::AfterDpStage, BellLabel::PsiPlus, 'X', "+H+1V+1 +V-1H-1"},
    {Checkpoint::AfterDpStage, BellLabel::PsiMinus, 'X', "+H+1V+1 -V-1H-1"},

    {Checkpoint::AfterOh, BellLabel::PhiPlus, 'P',
     "+H+1H+1 -H+1H-1 +H-1H+1 -H-1H-1 +V+1V+1 +V+1V-1 -V-1V+1 -V-1V-1"},
    {Checkpoint::AfterOh, BellLabel::PhiMinus, 'P',
     "+H+1H+1 -H+1H-1 +H-1H+1 -H-1H-1 -V+1V+1 -V+1V-1 +V-1V+1 +V-1V-1"},
    {Checkpoint::AfterOh, BellLabel::PsiPlus, 'X',
     "+H+1V+1 +H+1V-1 +H-1V+1 +H-1V-1 +V+1H+1 -V+1H-1 -V-1H+1 +V-1H-1"},
    {Checkpoint::AfterOh, BellLabel::PsiMinus, 'X',
     "+H+1V+1 +H+1V-1 +H-1V+1 +H-1V-1 -V+1H+1 +V+1H-1 +V-1H+1 -V-1H-1"},

    {Checkpoint::AfterHwp, BellLabel::PhiPlus, 'P',
     "+H+1H+1 +V+1V+1 -H+1V-1 -V+1H-1 +H-1V+1 +V-1H+1 -H-1H-1 -V-1V-1"},
    {Checkpoint::AfterHwp, BellLabel::PhiMinus, 'P',
     "+H+1V+1 +V+1H+1 -H+1H-1 -V+1V-1 +H-1H+1 +V-1V+1 -H-1V-1 -V-1H-1"},
    {Checkpoint::AfterHwp, BellLabel::PsiPlus, 'X',
     "+H+1H+1 -V+1V+1 -H+1V-1 +V+1H-1 -H-1V+1 +V-1H+1 +H-1H-1 -V-1V-1"},
    {Checkpoint::AfterHwp, BellLabel::PsiMinus, 'X',
     "+H+1V+1 -V+1H+1 -H+1H-1 +V+1V-1 -H-1H+1 +V-1V+1 +H-1V-1 -V-1H-1"},
};

inline Polarization pol_char(char c) {
  if (c == 'H') return Polarization::H;
  if (c == 'V') return Polarization::V;
  throw Error(ErrorKind::InvalidArgument, std::string("bad polarization in reference term: ") + c);
}

inline int oam_chars(char sign, char digit) {
  if ((sign != '+' && sign != '-') || digit < '0' || digit > '9')
    throw Error(ErrorKind::InvalidArgument, "bad OAM in reference term");
  return (sign == '-' ? -1 : 1) * (digit - '0');
}

}  // namespace detail

/// The reference state for `label` at `checkpoint`, on `space`.
inline TwoPhotonState expected_state(BellLabel label, Checkpoint checkpoint, const SpacePtr& space,
                                     const ArmPaths& arms = {}) {
  for (const auto& e : detail::kReferenceStates) {
    if (e.label != label || e.checkpoint != checkpoint) continue;
    std::vector<std::pair<std::string, std::string>> paths{{arms.a1, arms.a2}, {arms.b1, arms.b2}};
    if (e.path_factor == 'X') paths = {{arms.a1, arms.b2}, {arms.b1, arms.a2}};
    TwoPhotonState::Map amps;
    std::string_view rest = e.terms;
    while (!rest.empty()) {
      if (rest.front() == ' ') {
        rest.remove_prefix(1);
        continue;
      }
      if (rest.size() < 7) throw Error(ErrorKind::InvalidArgument, "truncated reference term");
      const double sign = rest[0] == '-' ? -1.0 : 1.0;
      const Polarization pa = detail::pol_char(rest[1]);
      const int la = detail::oam_chars(rest[2], rest[3]);
      const Polarization pb = detail::pol_char(rest[4]);
      const int lb = detail::oam_chars(rest[5], rest[6]);
      for (const auto& [x, y] : paths)
        amps[{make_mode(*space, pa, la, x), make_mode(*space, pb, lb, y)}] += sign;
      rest.remove_prefix(7);
    }
    return TwoPhotonState(space, std::move(amps)).normalized();
  }
  throw Error(ErrorKind::InvalidArgument, "no reference state");
}

// Classification table.

namespace detail {

inline constexpr std::string_view kDetectorTable = R"(
[PhiPlus]
D[+1,H,a1] & D[+1,H,a2]
D[+1,V,a1] & D[+1,V,a2]
D[+1,H,a1] & D[-1,V,a2]
D[+1,V,a1] & D[-1,H,a2]
D[-1,H,a1] & D[+1,V,a2]
D[-1,V,a1] & D[+1,H,a2]
D[-1,H,a1] & D[-1,H,a2]
D[-1,V,a1] & D[-1,V,a2]
D[+1,H,b1] & D[+1,H,b2]
D[+1,V,b1] & D[+1,V,b2]
D[+1,H,b1] & D[-1,V,b2]
D[+1,V,b1] & D[-1,H,b2]
D[-1,H,b1] & D[+1,V,b2]
D[-1,V,b1] & D[+1,H,b2]
D[-1,H,b1] & D[-1,H,b2]
D[-1,V,b1] & D[-1,V,b2]
[PhiMinus]
D[+1,H,a1] & D[+1,V,a2]
D[+1,V,a1] & D[+1,H,a2]
D[+1,H,a1] & D[-1,H,a2]
D[+1,V,a1] & D[-1,V,a2]
D[-1,H,a1] & D[+1,H,a2]
D[-1,V,a1] & D[+1,V,a2]
D[-1,H,a1] & D[-1,V,a2]
D[-1,V,a1] & D[-1,H,a2]
D[+1,H,b1] & D[+1,V,b2]
D[+1,V,b1] & D[+1,H,b2]
D[+1,H,b1] & D[-1,H,b2]
D[+1,V,b1] & D[-1,V,b2]
D[-1,H,b1] & D[+1,H,b2]
D[-1,V,b1] & D[+1,V,b2]
D[-1,H,b1] & D[-1,V,b2]
D[-1,V,b1] & D[-1,H,b2]
[PsiPlus]
D[+1,H,a1] & D[+1,H,b2]
D[+1,V,a1] & D[+1,V,b2]
D[+1,H,a1] & D[-1,V,b2]
D[+1,V,a1] & D[-1,H,b2]
D[-1,H,a1] & D[+1,V,b2]
D[-1,V,a1] & D[+1,H,b2]
D[-1,H,a1] & D[-1,H,b2]
D[-1,V,a1] & D[-1,V,b2]
D[+1,H,b1] & D[+1,H,a2]
D[+1,V,b1] & D[+1,V,a2]
D[+1,H,b1] & D[-1,V,a2]
D[+1,V,b1] & D[-1,H,a2]
D[-1,H,b1] & D[+1,V,a2]
D[-1,V,b1] & D[+1,H,a2]
D[-1,H,b1] & D[-1,H,a2]
D[-1,V,b1] & D[-1,V,a2]
[PsiMinus]
D[+1,H,a1] & D[+1,V,b2]
D[+1,V,a1] & D[+1,H,b2]
D[+1,H,a1] & D[-1,H,b2]
D[+1,V,a1] & D[-1,V,b2]
D[-1,H,a1] & D[+1,H,b2]
D[-1,V,a1] & D[+1,V,b2]
D[-1,H,a1] & D[-1,V,b2]
D[-1,V,a1] & D[-1,H,b2]
D[+1,H,b1] & D[+1,V,a2]
D[+1,V,b1] & D[+1,H,a2]
D[+1,H,b1] & D[-1,H,a2]
D[+1,V,b1] & D[-1,V,a2]
D[-1,H,b1] & D[+1,H,a2]
D[-1,V,b1] & D[+1,V,a2]
D[-1,H,b1] & D[-1,V,a2]
D[-1,V,b1] & D[-1,H,a2]
)";

}  // namespace detail

struct TableStructure {
  bool sizes_ok = false;  // 16 patterns per label
  bool disjoint = false;
  bool covering = false;  // union is every valid pattern
  std::string problem;

  bool ok() const { return sizes_ok && disjoint && covering; }
};

/// Detector pattern -> Bell label for the analyzer's four origins.
class ClassificationTable {
 public:
  using Entry = std::pair<CoincidencePattern, BellLabel>;

  ClassificationTable(std::vector<std::string> origins_a, std::vector<std::string> origins_b,
                      std::vector<Entry> entries)
      : origins_a_(std::move(origins_a)), origins_b_(std::move(origins_b)), entries_(std::move(entries)) {}

  /// Parses "[Label]" headers followed by one pattern per line.
  static ClassificationTable parse(std::string_view text, std::vector<std::string> origins_a,
                                   std::vector<std::string> origins_b) {
    std::vector<Entry> entries;
    std::optional<BellLabel> current;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      const std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        current = parse_bell_label(line.substr(1, line.size() - 2));
        if (!current) throw Error(ErrorKind::MalformedPattern, "unknown label " + std::string(line));
        continue;
      }
      if (!current) throw Error(ErrorKind::MalformedPattern, "pattern before any label");
      entries.emplace_back(parse_pattern(line), *current);
    }
    return ClassificationTable(std::move(origins_a), std::move(origins_b), std::move(entries));
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& origins(Photon p) const noexcept { return p == Photon::A ? origins_a_ : origins_b_; }

  /// Throws MalformedPattern when a detector sits on the wrong photon's
  /// side. The table is total over well-formed patterns.
  BellLabel classify(const CoincidencePattern& p) const {
    auto on_side = [](const std::vector<std::string>& origins, const DetectorId& d) {
      return std::find(origins.begin(), origins.end(), d.origin) != origins.end();
    };
    if (!on_side(origins_a_, p.a) || !on_side(origins_b_, p.b))
      throw Error(ErrorKind::MalformedPattern,
                  "pattern " + to_string(p) + " needs photon A at " + detail::join(origins_a_, "/") +
                      " and photon B at " + detail::join(origins_b_, "/"));
    for (const auto& [pattern, label] : entries_)
      if (pattern == p) return label;
    throw Error(ErrorKind::MalformedPattern, "pattern " + to_string(p) + " is not in the table");
  }

  std::vector<CoincidencePattern> preimage(BellLabel b) const {
    std::vector<CoincidencePattern> out;
    for (const auto& [pattern, label] : entries_)
      if (label == b) out.push_back(pattern);
    return out;
  }

  TableStructure structure() const {
    TableStructure s;
    std::map<CoincidencePattern, int> count;
    for (const auto& [pattern, label] : entries_) ++count[pattern];
    s.disjoint = std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 1; });
    if (!s.disjoint) s.problem = "a pattern appears under more than one label";
    const auto all = enumerate_patterns(origins_a_, origins_b_);
    s.covering = count.size() == all.size() &&
                 std::all_of(all.begin(), all.end(), [&](const CoincidencePattern& p) { return count.count(p) > 0; });
    if (!s.covering && s.problem.empty()) s.problem = "the table does not cover every pattern exactly";
    s.sizes_ok = std::all_of(kBellLabels.begin(), kBellLabels.end(),
                             [&](BellLabel b) { return preimage(b).size() == all.size() / 4; });
    if (!s.sizes_ok && s.problem.empty()) s.problem = "labels do not each own a quarter of the patterns";
    return s;
  }

  /// Copy with one pattern's label replaced; used for fault injection.
  ClassificationTable relabeled(const CoincidencePattern& p, BellLabel to) const {
    ClassificationTable t = *this;
    bool found = false;
    for (auto& [pattern, label] : t.entries_) {
      if (pattern == p) {
        label = to;
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::MalformedPattern, "pattern " + to_string(p) + " is not in the table");
    return t;
  }

  friend bool operator==(const ClassificationTable&, const ClassificationTable&) = default;

 private:
  std::vector<std::string> origins_a_;
  std::vector<std::string> origins_b_;
  std::vector<Entry> entries_;
};

/// The analyzer's detector table, validated on first use.
inline const ClassificationTable& detector_table() {
  static const ClassificationTable table = [] {
    auto t = ClassificationTable::parse(detail::kDetectorTable, {"a1", "b1"}, {"a2", "b2"});
    const auto s = t.structure();
    if (!s.ok()) throw Error(ErrorKind::InvalidArgument, "built-in detector table is inconsistent: " + s.problem);
    return t;
  }();
  return table;
}

inline BellLabel classify(const CoincidencePattern& p) { return detector_table().classify(p); }

// Pipeline.

/// fig2 compiled with every composite stage set to `impl`.
inline CompiledCircuit analyzer_circuit(Impl impl = Impl::Canonical, int lmax = kDefaultLmax) {
  return compile(with_lmax(with_impl(fig2_circuit(), impl), lmax));
}

inline SppmMethod sppm_method(Impl impl) {
  return impl == Impl::Canonical ? SppmMethod::Direct : SppmMethod::Decomposed;
}

struct StageSnapshot {
  Checkpoint checkpoint;
  int stage = 0;  // last stage index of the group
  TwoPhotonState state;
  double fidelity = 0.0;  // against the reference state
};

/// Propagated state after each stage group, with its fidelity against the
/// reference state.
inline std::vector<StageSnapshot> stage_states(const CompiledCircuit& c, BellLabel label) {
  const auto bounds = group_boundaries(c.source);
  if (bounds.size() != kCheckpoints.size())
    throw Error(ErrorKind::InvalidArgument, "circuit does not have the analyzer's five stage groups");
  std::vector<StageSnapshot> out;
  TwoPhotonState state = prepare_input(label, c.space);
  int done = -1;
  for (std::size_t g = 0; g < bounds.size(); ++g) {
    for (const auto& step : c.steps) {
      if (step.stage <= done || step.stage > bounds[g]) continue;
      try {
        state = hbsa::apply(step.op, state);
      } catch (const Error& e) {
        throw e.at_stage(step.stage, summarize(c.source.stages[step.stage]));
      }
    }
    done = bounds[g];
    const auto ref = expected_state(label, kCheckpoints[g], c.space);
    out.push_back({kCheckpoints[g], bounds[g], state, fidelity(state, ref)});
  }
  return out;
}

inline std::vector<StageSnapshot> stage_states(BellLabel label, Impl impl = Impl::Canonical,
                                               int lmax = kDefaultLmax) {
  return stage_states(analyzer_circuit(impl, lmax), label);
}

inline OutcomeDistribution analyze(const CompiledCircuit& c, BellLabel label, Impl impl) {
  return measure(c, propagate(c, prepare_input(label, c.space)), sppm_method(impl));
}

inline OutcomeDistribution analyze(BellLabel label, Impl impl = Impl::Canonical, int lmax = kDefaultLmax) {
  return analyze(analyzer_circuit(impl, lmax), label, impl);
}

/// Max over the four inputs of the total-variation distance between the
/// sparse pipeline and dense matrix application.
inline double oracle_check(const CompiledCircuit& c, Impl impl,
                           std::size_t cap = dense::kDefaultDimensionCap) {
  const AssembledUnitary u = assemble_unitary(c, cap);
  double worst = 0.0;
  for (BellLabel b : kBellLabels) {
    const TwoPhotonState in = prepare_input(b, c.space);
    worst = std::max(worst, total_variation(analyze(c, b, impl), dense_analyze(c, u, in)));
  }
  return worst;
}

inline double oracle_check(Impl impl = Impl::Canonical, int lmax = kDefaultLmax) {
  return oracle_check(analyzer_circuit(impl, lmax), impl);
}

// Verification.

inline constexpr double kVerifyTolerance = 1e-10;

struct LabelReport {
  BellLabel label = BellLabel::PhiPlus;
  std::vector<CoincidencePattern> support;
  double min_probability = 0.0;  // over the support
  double max_probability = 0.0;
  double mass_outside_row = 0.0;
  double total = 0.0;
  double success = 0.0;  // P(classify(pattern) == label)
  bool path_sector_ok = false;
  std::vector<std::pair<Checkpoint, double>> stage_fidelities;
  OutcomeDistribution distribution;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  Impl impl = Impl::Canonical;
  int lmax = kDefaultLmax;
  std::vector<LabelReport> labels;
  TableStructure table;
  double success_probability = 0.0;
  int accuracy_hits = 0;
  int accuracy_total = 0;
  std::vector<CoincidencePattern> mismatched;
  double oracle_residual = 0.0;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c.name + ": " + c.detail);
    return out;
  }
};

namespace detail {

inline bool in_path_sector(BellLabel label, const CoincidencePattern& p) {
  const bool a_side_a = p.a.origin == "a1";
  const bool b_side_a = p.b.origin == "a2";
  return is_phi(label) ? (a_side_a == b_side_a) : (a_side_a != b_side_a);
}

inline std::string fmt(double x) { return format_probability(x); }

}  // namespace detail

/// Runs the analyzer on all four inputs and checks the table, the
/// distributions, the stage references, the success probability and the
/// dense oracle. Failures become report entries.
inline VerificationReport verify(Impl impl = Impl::Canonical, const ClassificationTable* table = nullptr,
                                 int lmax = kDefaultLmax) {
  const ClassificationTable& t = table ? *table : detector_table();
  const CompiledCircuit c = analyzer_circuit(impl, lmax);
  VerificationReport r;
  r.impl = impl;
  r.lmax = lmax;
  r.table = t.structure();
  auto check = [&](std::string name, bool pass, std::string detail) {
    r.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  check("table_sizes", r.table.sizes_ok, r.table.sizes_ok ? "16 patterns per label" : r.table.problem);
  check("table_disjoint", r.table.disjoint, r.table.disjoint ? "no pattern has two labels" : r.table.problem);
  check("table_covering", r.table.covering, r.table.covering ? "all 64 patterns labelled" : r.table.problem);

  const auto all = enumerate_patterns(t.origins(Photon::A), t.origins(Photon::B));
  std::map<CoincidencePattern, std::vector<BellLabel>> produced_by;
  double success_sum = 0.0;

  for (BellLabel b : kBellLabels) {
    LabelReport lr;
    lr.label = b;
    lr.distribution = analyze(c, b, impl);
    const auto& dist = lr.distribution;
    const auto row = t.preimage(b);
    const double expected = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
    lr.support = dist.support(kVerifyTolerance);
    lr.total = dist.total();
    lr.min_probability = 1.0;
    lr.path_sector_ok = true;
    for (const auto& p : lr.support) {
      const double q = dist.probability(p);
      lr.min_probability = std::min(lr.min_probability, q);
      lr.max_probability = std::max(lr.max_probability, q);
      lr.path_sector_ok = lr.path_sector_ok && detail::in_path_sector(b, p);
      produced_by[p].push_back(b);
    }
    if (lr.support.empty()) lr.min_probability = 0.0;
    for (std::size_t i = 0; i < dist.patterns().size(); ++i) {
      const auto& p = dist.patterns()[i];
      const double q = dist.probabilities()[i];
      const bool in_row = std::find(row.begin(), row.end(), p) != row.end();
      if (!in_row) lr.mass_outside_row += q;
      std::optional<BellLabel> guess;
      try {
        guess = t.classify(p);
      } catch (const Error&) {
      }
      if (guess == b) lr.success += q;
    }
    success_sum += lr.success;
    for (const auto& snap : stage_states(c, b)) lr.stage_fidelities.emplace_back(snap.checkpoint, snap.fidelity);

    const std::string name(to_string(b));
    std::vector<CoincidencePattern> sorted_row = row;
    std::sort(sorted_row.begin(), sorted_row.end());
    std::vector<CoincidencePattern> sorted_support = lr.support;
    std::sort(sorted_support.begin(), sorted_support.end());
    check("support_" + name, sorted_support == sorted_row,
          std::to_string(lr.support.size()) + " supported patterns, table row has " + std::to_string(row.size()));
    const bool equi = !lr.support.empty() && std::abs(lr.min_probability - expected) <= kVerifyTolerance &&
                      std::abs(lr.max_probability - expected) <= kVerifyTolerance;
    check("equiprobable_" + name, equi,
          "min " + detail::fmt(lr.min_probability) + ", max " + detail::fmt(lr.max_probability));
    check("outside_row_" + name, lr.mass_outside_row <= kVerifyTolerance, "mass " + detail::fmt(lr.mass_outside_row));
    check("normalized_" + name, std::abs(lr.total - 1.0) <= kVerifyTolerance, "total " + detail::fmt(lr.total));
    check("path_sector_" + name, lr.path_sector_ok,
          is_phi(b) ? "origins (a1,a2) or (b1,b2)" : "origins (a1,b2) or (b1,a2)");
    double worst_fid = 1.0;
    for (const auto& [cp, f] : lr.stage_fidelities) worst_fid = std::min(worst_fid, f);
    check("stage_fidelity_" + name, worst_fid >= 1.0 - kVerifyTolerance, "min fidelity " + detail::fmt(worst_fid));
    r.labels.push_back(std::move(lr));
  }

  r.success_probability = success_sum / static_cast<double>(kBellLabels.size());
  check("success_probability", std::abs(r.success_probability - 1.0) <= kVerifyTolerance,
        detail::fmt(r.success_probability));

  for (const auto& p : all) {
    ++r.accuracy_total;
    std::optional<BellLabel> table_label;
    try {
      table_label = t.classify(p);
    } catch (const Error&) {
    }
    const auto it = produced_by.find(p);
    const bool unique = it != produced_by.end() && it->second.size() == 1;
    if (unique && table_label == it->second.front())
      ++r.accuracy_hits;
    else
      r.mismatched.push_back(p);
  }
  std::string mismatch_text = std::to_string(r.accuracy_hits) + "/" + std::to_string(r.accuracy_total);
  for (const auto& p : r.mismatched) mismatch_text += "; mismatch " + to_string(p);
  check("classification_accuracy", r.accuracy_hits == r.accuracy_total, mismatch_text);

  try {
    r.oracle_residual = oracle_check(c, impl);
    check("oracle_agreement", r.oracle_residual <= kVerifyTolerance, "residual " + detail::fmt(r.oracle_residual));
  } catch (const Error& e) {
    r.oracle_residual = 1.0;
    check("oracle_agreement", false, e.what());
  }
  return r;
}

}  // namespace hbsa
