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

// Circuit data model, compilation to operations, and sparse propagation.
// The text format lives in circuit_io.hpp.

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hbsa/gates.hpp"

namespace hbsa {

enum class StageKind {
  Qwp,
  Hwp,
  QPlate,
  Spp,
  DovePrism,
  PhasePlate,
  Mirror,
  BeamSplitter,
  Pbs,
  OamSorter,
  DelayLine,
  PCos,
  OCps,
  OamHadamard,
  DpStage,
  Sppm,
};

/// File-format keyword for each stage kind.
inline std::string_view keyword(StageKind k) {
  switch (k) {
    case StageKind::Qwp: return "qwp";
    case StageKind::Hwp: return "hwp";
    case StageKind::QPlate: return "qp";
    case StageKind::Spp: return "spp";
    case StageKind::DovePrism: return "dp";
    case StageKind::PhasePlate: return "pp";
    case StageKind::Mirror: return "mirror";
    case StageKind::BeamSplitter: return "bs";
    case StageKind::Pbs: return "pbs";
    case StageKind::OamSorter: return "oam_sorter";
    case StageKind::DelayLine: return "dl";
    case StageKind::PCos: return "p_cos";
    case StageKind::OCps: return "o_cps";
    case StageKind::OamHadamard: return "oh";
    case StageKind::DpStage: return "dp_stage";
    case StageKind::Sppm: return "sppm";
  }
  return "?";
}

inline constexpr StageKind kAllStageKinds[] = {
    StageKind::Qwp,         StageKind::Hwp,        StageKind::QPlate,    StageKind::Spp,
    StageKind::DovePrism,   StageKind::PhasePlate, StageKind::Mirror,    StageKind::BeamSplitter,
    StageKind::Pbs,         StageKind::OamSorter,  StageKind::DelayLine, StageKind::PCos,
    StageKind::OCps,        StageKind::OamHadamard, StageKind::DpStage,  StageKind::Sppm,
};

inline std::optional<StageKind> stage_kind_from_keyword(std::string_view word) {
  for (StageKind k : kAllStageKinds)
    if (keyword(k) == word) return k;
  return std::nullopt;
}

inline bool is_composite(StageKind k) {
  return k == StageKind::PCos || k == StageKind::OCps || k == StageKind::OamHadamard || k == StageKind::DpStage;
}

inline bool needs_path_pair(StageKind k) {
  return k == StageKind::BeamSplitter || k == StageKind::Pbs || k == StageKind::OamSorter || k == StageKind::OCps;
}

enum class Impl { Canonical, Decomposed };

inline std::string_view to_string(Impl i) { return i == Impl::Canonical ? "canonical" : "decomposed"; }

/// One line of a circuit document. Optional parameters are set only when
/// the kind uses them.
struct Stage {
  StageKind kind = StageKind::DelayLine;
  Photon photon = Photon::A;
  std::vector<std::string> paths;
  std::optional<double> angle;         // hwp angle, dp alpha, pp phi
  std::optional<int> twice_q;          // qp, p_cos
  std::optional<int> shift;            // spp
  std::optional<Polarization> pol;     // pp selector
  std::optional<int> oam;              // pp selector
  std::optional<std::string> aux;      // oh scratch path (decomposed)
  std::vector<std::string> ports;      // sppm-local port names, not circuit paths
  std::optional<Impl> impl;            // composite stages
  int line = 0;                        // source line, not part of identity

  friend bool operator==(const Stage& x, const Stage& y) {
    return x.kind == y.kind && x.photon == y.photon && x.paths == y.paths && x.angle == y.angle &&
           x.twice_q == y.twice_q && x.shift == y.shift && x.pol == y.pol && x.oam == y.oam && x.aux == y.aux &&
           x.ports == y.ports && x.impl == y.impl;
  }
};

struct Circuit {
  std::string name;
  std::string description;
  int lmax = kDefaultLmax;
  std::vector<std::string> paths;
  std::vector<Photon> photons;
  std::vector<Stage> stages;

  friend bool operator==(const Circuit&, const Circuit&) = default;

  bool declares(Photon p) const { return std::find(photons.begin(), photons.end(), p) != photons.end(); }
};

/// Short human-readable form of a stage, used in diagnostics.
inline std::string summarize(const Stage& s) {
  return std::string(keyword(s.kind)) + " photon=" + std::string(to_string(s.photon)) +
         " paths=" + detail::join(s.paths, ",");
}

/// Returns a copy with every composite stage forced to `impl`.
inline Circuit with_impl(Circuit c, Impl impl) {
  for (auto& s : c.stages)
    if (is_composite(s.kind)) s.impl = impl;
  return c;
}

inline Circuit with_lmax(Circuit c, int lmax) {
  c.lmax = lmax;
  return c;
}

// Compilation.

struct Step {
  int stage = 0;
  Operation op;
};

struct MeasurementSite {
  int stage = 0;
  Photon photon = Photon::A;
  std::vector<std::string> origins;
  std::vector<std::string> ports;
};

struct CompiledCircuit {
  Circuit source;
  SpacePtr space;
  std::vector<Step> steps;
  std::vector<MeasurementSite> measurements;

  /// Origins measured for one photon, in stage order. Without SPPM stages
  /// every declared path is an origin.
  std::vector<std::string> origins(Photon p) const {
    std::vector<std::string> out;
    for (const auto& m : measurements)
      if (m.photon == p) out.insert(out.end(), m.origins.begin(), m.origins.end());
    if (measurements.empty()) out.assign(source.paths.begin(), source.paths.end());
    return out;
  }

  int unitary_stage_count() const {
    int n = 0;
    for (const auto& s : source.stages) n += s.kind == StageKind::Sppm ? 0 : 1;
    return n;
  }
};

inline constexpr std::string_view kScratchPathName = "aux";

namespace detail {

inline Element element_for(const Stage& s) {
  const Photon p = s.photon;
  switch (s.kind) {
    case StageKind::Qwp: return Element::qwp(p, s.paths);
    case StageKind::Hwp: return Element::hwp(p, s.paths, s.angle.value_or(0.0));
    case StageKind::QPlate: return Element::qplate(p, s.paths, s.twice_q.value_or(0) / 2.0);
    case StageKind::Spp: return Element::spp(p, s.paths, s.shift.value_or(0));
    case StageKind::DovePrism: return Element::dove(p, s.paths, s.angle.value_or(0.0));
    case StageKind::PhasePlate: return Element::phase_plate(p, s.paths, s.angle.value_or(0.0), s.pol, s.oam);
    case StageKind::Mirror: return Element::mirror(p, s.paths);
    case StageKind::BeamSplitter: return Element::beam_splitter(p, s.paths.at(0), s.paths.at(1));
    case StageKind::Pbs: return Element::pbs(p, s.paths.at(0), s.paths.at(1));
    case StageKind::OamSorter: return Element::oam_sorter(p, s.paths.at(0), s.paths.at(1));
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument, "stage kind is not a primitive element");
}

inline std::string unique_scratch_name(const std::vector<std::string>& taken) {
  std::string name(kScratchPathName);
  while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "_";
  return name;
}

}  // namespace detail

/// Expands stages into operations. Composite stages follow their own
/// `impl` (default canonical). A decomposed OH without an explicit `aux`
/// gets a scratch path appended to the mode space.
inline CompiledCircuit compile(const Circuit& circuit) {
  CompiledCircuit out;
  out.source = circuit;
  std::vector<std::string> paths = circuit.paths;
  std::optional<std::string> scratch;
  for (const auto& s : circuit.stages) {
    if (s.kind == StageKind::OamHadamard && s.impl == Impl::Decomposed && !s.aux) {
      scratch = detail::unique_scratch_name(paths);
      paths.push_back(*scratch);
      break;
    }
  }
  out.space = make_space(circuit.lmax, paths);

  for (std::size_t i = 0; i < circuit.stages.size(); ++i) {
    const Stage& s = circuit.stages[i];
    const int idx = static_cast<int>(i);
    const bool decomposed = s.impl == Impl::Decomposed;
    auto emit = [&](const Operation& op) { out.steps.push_back({idx, op}); };
    auto emit_all = [&](const std::vector<Element>& es) {
      for (const auto& e : es) emit(e);
    };
    try {
      switch (s.kind) {
        case StageKind::DelayLine:
          break;
        case StageKind::Sppm:
          out.measurements.push_back({idx, s.photon, s.paths, s.ports});
          break;
        case StageKind::PCos:
          if (decomposed)
            emit_all(p_cos_decompose(s.photon, s.paths, s.twice_q.value_or(1)));
          else
            emit(GateOp{GateKind::PCos, s.photon, s.paths, s.twice_q.value_or(1)});
          break;
        case StageKind::OCps:
          if (decomposed)
            emit_all(o_cps_decompose(s.photon, s.paths.at(0), s.paths.at(1)));
          else
            emit(GateOp{GateKind::OCps, s.photon, s.paths});
          break;
        case StageKind::OamHadamard:
          if (decomposed)
            emit_all(oh_decompose(s.photon, s.paths, s.aux ? *s.aux : *scratch));
          else
            emit(GateOp{GateKind::OamHadamard, s.photon, s.paths});
          break;
        case StageKind::DpStage:
          if (decomposed)
            emit_all(dp_stage_decompose(s.photon, s.paths));
          else
            emit(GateOp{GateKind::OamFlip, s.photon, s.paths});
          break;
        default:
          emit(detail::element_for(s));
          break;
      }
    } catch (const Error& e) {
      throw e.at_stage(idx, summarize(s));
    }
  }
  return out;
}

// Propagation.

/// Applies every operation of stages [0, through_stage] (all when -1).
/// Errors name the stage that raised them.
inline TwoPhotonState propagate(const CompiledCircuit& c, TwoPhotonState state, int through_stage = -1) {
  if (!(state.space() == *c.space))
    throw Error(ErrorKind::DimensionMismatch, "input state is not on the circuit's mode space");
  for (const auto& step : c.steps) {
    if (through_stage >= 0 && step.stage > through_stage) break;
    try {
      state = hbsa::apply(step.op, state);
    } catch (const Error& e) {
      throw e.at_stage(step.stage, summarize(c.source.stages[step.stage]));
    }
  }
  return state;
}

inline TwoPhotonState propagate(const Circuit& c, const TwoPhotonState& state) {
  return propagate(compile(c), state);
}

/// One photon's evolution; operations on the other photon are skipped.
inline PhotonState propagate_photon(const CompiledCircuit& c, Photon which, PhotonState state) {
  for (const auto& step : c.steps) {
    if (photon_of(step.op) != which) continue;
    try {
      state = hbsa::apply(step.op, state);
    } catch (const Error& e) {
      throw e.at_stage(step.stage, summarize(c.source.stages[step.stage]));
    }
  }
  return state;
}

/// Last stage index of each maximal run of same-kind stages, ignoring
/// delay lines and measurement. These are the checkpoints at which a
/// staged evolution is reported.
inline std::vector<int> group_boundaries(const Circuit& c) {
  std::vector<int> out;
  std::optional<StageKind> current;
  for (std::size_t i = 0; i < c.stages.size(); ++i) {
    const StageKind k = c.stages[i].kind;
    if (k == StageKind::DelayLine || k == StageKind::Sppm) continue;
    if (current && *current == k) {
      out.back() = static_cast<int>(i);
    } else {
      out.push_back(static_cast<int>(i));
      current = k;
    }
  }
  return out;
}

// Validation.

enum class Severity { Error, Warning, Note };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "?";
}

struct Finding {
  Severity severity = Severity::Note;
  int stage = -1;  // -1: whole circuit
  std::optional<ErrorKind> kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  int max_abs_oam = 0;  // worst case over both photons

  bool ok() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.severity == Severity::Error; });
  }
  std::size_t count(Severity s) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [s](const Finding& f) { return f.severity == s; }));
  }
};

/// Structural and worst-case checks that do not need a state: two-path
/// stages on distinct paths, measurement placement, worst-case |l| from
/// l = 0 inputs, domain restrictions and unused paths.
inline ValidationReport validate(const Circuit& c) {
  ValidationReport r;
  auto add = [&](Severity sev, int stage, std::optional<ErrorKind> kind, std::string msg) {
    r.findings.push_back({sev, stage, kind, std::move(msg)});
  };

  std::set<std::string> referenced;

  // Worst-case OAM interval per photon, starting from l = 0.
  int lo[2] = {0, 0}, hi[2] = {0, 0};
  bool measured = false;

  for (std::size_t i = 0; i < c.stages.size(); ++i) {
    const Stage& s = c.stages[i];
    const int idx = static_cast<int>(i);
    const int ph = static_cast<int>(s.photon);
    referenced.insert(s.paths.begin(), s.paths.end());
    if (s.aux) referenced.insert(*s.aux);

    if (!c.declares(s.photon))
      add(Severity::Error, idx, ErrorKind::SemanticError, "photon " + std::string(to_string(s.photon)) + " is not declared");
    for (const auto& p : s.paths) {
      if (std::find(c.paths.begin(), c.paths.end(), p) == c.paths.end())
        add(Severity::Error, idx, ErrorKind::UnknownPath, "path '" + p + "' is not declared");
    }

    if (needs_path_pair(s.kind)) {
      if (s.paths.size() != 2) {
        add(Severity::Error, idx, ErrorKind::SemanticError, std::string(keyword(s.kind)) + " needs exactly two paths");
      } else if (s.paths[0] == s.paths[1]) {
        add(Severity::Error, idx, ErrorKind::SamePath,
            std::string(keyword(s.kind)) + " references path '" + s.paths[0] + "' twice");
      }
    }

    if (s.kind == StageKind::Sppm) {
      measured = true;
      add(Severity::Note, idx, std::nullopt,
          "SPPM requires l = +1 or -1 on " + detail::join(s.paths, ","));
      continue;
    }
    if (measured) {
      add(Severity::Error, idx, ErrorKind::SemanticError, "stage follows a measurement stage");
    }

    int& l0 = lo[ph];
    int& l1 = hi[ph];
    auto widen = [&](int a, int b) {
      l0 = std::min(l0, a);
      l1 = std::max(l1, b);
    };
    switch (s.kind) {
      case StageKind::Spp:
        widen(l0 + s.shift.value_or(0), l1 + s.shift.value_or(0));
        break;
      case StageKind::QPlate:
      case StageKind::PCos: {
        const int q2 = std::abs(s.twice_q.value_or(0));
        widen(l0 - q2, l1 + q2);
        break;
      }
      case StageKind::DovePrism:
      case StageKind::Mirror:
      case StageKind::DpStage:
        widen(-l1, -l0);
        break;
      case StageKind::OCps:
      case StageKind::OamHadamard:
      case StageKind::OamSorter:
        add(Severity::Note, idx, std::nullopt,
            std::string(keyword(s.kind)) + " requires l = +1 or -1 on " + detail::join(s.paths, ","));
        if (s.kind == StageKind::OamHadamard) widen(-1, 1);
        break;
      default:
        break;
    }
    const int worst = std::max(std::abs(l0), std::abs(l1));
    r.max_abs_oam = std::max(r.max_abs_oam, worst);
    if (worst > c.lmax) {
      add(Severity::Error, idx, ErrorKind::OamOverflow,
          "worst-case |l| = " + std::to_string(worst) + " exceeds lmax " + std::to_string(c.lmax));
      // Report the first overflow per photon only.
      l0 = std::max(l0, -c.lmax);
      l1 = std::min(l1, c.lmax);
    }
  }

  for (const auto& p : c.paths) {
    if (!referenced.count(p)) add(Severity::Warning, -1, std::nullopt, "path '" + p + "' is never used");
  }
  for (Photon p : c.photons) {
    const bool used = std::any_of(c.stages.begin(), c.stages.end(), [p](const Stage& s) { return s.photon == p; });
    if (!used) add(Severity::Warning, -1, std::nullopt, "photon " + std::string(to_string(p)) + " has no stages");
  }
  return r;
}

}  // namespace hbsa
