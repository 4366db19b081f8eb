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

// Composite gates: canonical truth-table actions, element-level
// decompositions, and the calibration that reconciles the two.
//
// Canonical contracts (unit phases throughout):
//   P-COS(q)   |H,l> -> |H,l+2q>,  |V,l> -> |V,l-2q>
//   O-CPS      |+1>|x> -> |+1>|x>, |-1>|x> -> |-1>|y>, and x <-> y
//   OH         |+1> -> (|+1> + |-1>)/sqrt2, |-1> -> (|+1> - |-1>)/sqrt2
//   OAM flip   |l> -> |-l>
//
// Decompositions carry explicit phase plates tagged "calibration". For
// O-CPS and OH the calibration phases are solved once from the truth-table
// constraints; a solve that cannot reconcile routing throws
// CalibrationFailure.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hbsa/elements.hpp"

namespace hbsa {

inline constexpr std::string_view kCalibrationTag = "calibration";

enum class GateKind { PCos, OCps, OamHadamard, OamFlip };

inline std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::PCos: return "P-COS";
    case GateKind::OCps: return "O-CPS";
    case GateKind::OamHadamard: return "OH";
    case GateKind::OamFlip: return "OAM-FLIP";
  }
  return "?";
}

/// A canonical composite gate placed on one photon.
struct GateOp {
  GateKind kind = GateKind::OamFlip;
  Photon photon = Photon::A;
  std::vector<std::string> paths;  // O-CPS: exactly (x, y)
  int twice_q = 1;                 // P-COS only

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

inline std::string describe(const GateOp& g) {
  std::string out(to_string(g.kind));
  if (g.kind == GateKind::PCos) out += "(q=" + detail::format_half_integer(g.twice_q) + ")";
  out += " photon=" + std::string(to_string(g.photon)) + " paths=" + detail::join(g.paths, ",");
  return out;
}

using Operation = std::variant<Element, GateOp>;

inline std::string describe(const Operation& op) {
  return std::visit([](const auto& x) { return describe(x); }, op);
}

inline Photon photon_of(const Operation& op) {
  return std::visit([](const auto& x) { return x.photon; }, op);
}

namespace detail {

inline void require_pm1(const ModeSpace& space, const BasisMode& m, std::string_view gate) {
  if (m.oam != 1 && m.oam != -1) {
    throw Error(ErrorKind::UnsortableOam,
                std::string(gate) + " requires l = +1 or -1, got " + space.describe(m));
  }
}

}  // namespace detail

inline auto mode_action(const GateOp& g, const ModeSpace& space) {
  ResolvedSite site;
  for (const auto& p : g.paths) site.ids.push_back(space.path_id(p));
  if (site.ids.empty()) throw Error(ErrorKind::InvalidArgument, describe(g) + " has no paths");
  if (g.kind == GateKind::OCps) {
    if (site.ids.size() != 2) throw Error(ErrorKind::InvalidArgument, "O-CPS needs exactly two paths");
    if (site.ids[0] == site.ids[1]) throw Error(ErrorKind::SamePath, "O-CPS references one path twice");
  }
  return [g, site, &space](const BasisMode& m) -> ModeImage {
    if (!site.contains(m.path)) return ModeImage::identity(m);
    ModeImage img;
    switch (g.kind) {
      case GateKind::PCos: {
        const int shift = m.pol == Polarization::H ? g.twice_q : -g.twice_q;
        img.add(BasisMode{m.pol, m.oam + shift, m.path}, 1.0);
        break;
      }
      case GateKind::OCps: {
        detail::require_pm1(space, m, "O-CPS");
        const PathId other = m.path == site.ids[0] ? site.ids[1] : site.ids[0];
        img.add(m.oam == 1 ? m : BasisMode{m.pol, m.oam, other}, 1.0);
        break;
      }
      case GateKind::OamHadamard:
        detail::require_pm1(space, m, "OH");
        img.add(BasisMode{m.pol, 1, m.path}, kInvSqrt2);
        img.add(BasisMode{m.pol, -1, m.path}, m.oam == 1 ? kInvSqrt2 : -kInvSqrt2);
        break;
      case GateKind::OamFlip:
        img.add(BasisMode{m.pol, -m.oam, m.path}, 1.0);
        break;
    }
    return img;
  };
}

inline PhotonState apply(const GateOp& g, const PhotonState& s) {
  return apply_action(s, mode_action(g, s.space()));
}

inline TwoPhotonState apply(const GateOp& g, const TwoPhotonState& s) {
  return apply_action(s, g.photon, mode_action(g, s.space()));
}

inline PhotonState apply(const Operation& op, const PhotonState& s) {
  return std::visit([&](const auto& x) { return hbsa::apply(x, s); }, op);
}

inline TwoPhotonState apply(const Operation& op, const TwoPhotonState& s) {
  return std::visit([&](const auto& x) { return hbsa::apply(x, s); }, op);
}

template <typename State>
State apply_all(std::span<const Operation> ops, State s) {
  for (const auto& op : ops) s = hbsa::apply(op, s);
  return s;
}

template <typename State>
State apply_all(std::span<const Element> ops, State s) {
  for (const auto& op : ops) s = hbsa::apply(op, s);
  return s;
}

// Canonical entry points.

inline PhotonState p_cos_apply(const PhotonState& s, double q, std::vector<std::string> site) {
  const Element probe = Element::qplate(Photon::A, {}, q);  // validates 2q
  return apply(GateOp{GateKind::PCos, Photon::A, std::move(site), probe.twice_q}, s);
}

inline PhotonState o_cps_apply(const PhotonState& s, std::string x, std::string y) {
  return apply(GateOp{GateKind::OCps, Photon::A, {std::move(x), std::move(y)}}, s);
}

inline PhotonState oh_apply(const PhotonState& s, std::vector<std::string> site) {
  return apply(GateOp{GateKind::OamHadamard, Photon::A, std::move(site)}, s);
}

inline PhotonState oam_flip_apply(const PhotonState& s, std::vector<std::string> site) {
  return apply(GateOp{GateKind::OamFlip, Photon::A, std::move(site)}, s);
}

// Decompositions.

/// QWP(-pi/4), QP(q), QWP(-pi/4), PP(pi, V-only). The trailing plate undoes
/// the -1 that QWP.QP.QWP leaves on |V>.
inline std::vector<Element> p_cos_decompose(Photon p, const std::vector<std::string>& site, int twice_q) {
  const Element qp = Element::qplate(p, site, twice_q / 2.0);
  return {
      Element::qwp(p, site),
      qp,
      Element::qwp(p, site),
      Element::phase_plate(p, site, kPi, Polarization::V).tagged(std::string(kCalibrationTag)),
  };
}

namespace detail {

/// O-CPS interferometer without calibration plates:
/// SPP(+1), PP(pi) on x, BS, DP(pi/4) on x, DP(0) on y, a mirror in each arm,
/// BS, SPP(-1). Calibration plates go in at index 2 (input y) and just
/// before the final SPP (output y); a plain path phase commutes with SPP.
inline std::vector<Element> ocps_bare(Photon p, const std::string& x, const std::string& y) {
  return {
      Element::spp(p, {x, y}, +1),
      Element::phase_plate(p, {x}, kPi),
      Element::beam_splitter(p, x, y),
      Element::dove(p, {x}, kPi / 4.0),
      Element::dove(p, {y}, 0.0),
      Element::mirror(p, {x}),
      Element::mirror(p, {y}),
      Element::beam_splitter(p, x, y),
      Element::spp(p, {x, y}, -1),
  };
}

/// The single image term of `in`, or CalibrationFailure if routing leaks.
inline cplx routed_amplitude(const PhotonState& out, const BasisMode& expected) {
  if (out.size() != 1 || std::abs(std::abs(out.amplitude(expected)) - 1.0) > 1e-12) {
    throw Error(ErrorKind::CalibrationFailure,
                "interferometer does not route " + out.space().describe(expected) + " deterministically");
  }
  return out.amplitude(expected);
}

inline double arg_or_zero(cplx z) { return std::abs(z) < 1e-300 ? 0.0 : std::arg(z); }

/// Phase angles snapped to multiples of pi/2 when within rounding, so the
/// documented calibration values print exactly.
inline double snap_angle(double phi) {
  const double q = phi / (kPi / 2.0);
  const double r = std::round(q);
  return std::abs(q - r) < 1e-12 ? r * (kPi / 2.0) : phi;
}

}  // namespace detail

struct OcpsCalibration {
  double input_phase_y = 0.0;   // PP before the first BS on the second path
  double output_phase_y = 0.0;  // PP after the second BS on the second path
  cplx global_phase{1.0, 0.0};  // decomposition = global_phase * canonical
};

/// Solves the four O-CPS truth-table constraints for the two calibration
/// phases, with unit phase fixed on the first path.
inline OcpsCalibration solve_ocps_calibration() {
  const SpacePtr space = make_space(3, {"x", "y"});
  const auto bare = detail::ocps_bare(Photon::A, "x", "y");
  auto route = [&](int l, const char* in, const char* out) {
    const PhotonState s = apply_all<PhotonState>(bare, basis_state(space, Polarization::H, l, in));
    return detail::routed_amplitude(s, make_mode(*space, Polarization::H, l, out));
  };
  const cplx stay_x = route(+1, "x", "x");
  const cplx stay_y = route(+1, "y", "y");
  const cplx cross_xy = route(-1, "x", "y");
  const cplx cross_yx = route(-1, "y", "x");

  const cplx c = stay_x;
  const cplx out_y = c / cross_xy;
  const cplx in_y = c / (stay_y * out_y);
  if (std::abs(cross_yx * in_y - c) > 1e-12) {
    throw Error(ErrorKind::CalibrationFailure, "O-CPS phases cannot be reconciled with per-path plates");
  }
  return {detail::snap_angle(detail::arg_or_zero(in_y)), detail::snap_angle(detail::arg_or_zero(out_y)), c};
}

inline const OcpsCalibration& ocps_calibration() {
  static const OcpsCalibration cal = solve_ocps_calibration();
  return cal;
}

/// Element-level O-CPS on the ordered pair (x, y), calibrated.
inline std::vector<Element> o_cps_decompose(Photon p, const std::string& x, const std::string& y) {
  const auto& cal = ocps_calibration();
  auto seq = detail::ocps_bare(p, x, y);
  const std::string tag(kCalibrationTag);
  seq.insert(seq.begin() + 2, Element::phase_plate(p, {y}, cal.input_phase_y).tagged(tag));
  seq.insert(seq.end() - 1, Element::phase_plate(p, {y}, cal.output_phase_y).tagged(tag));
  return seq;
}

namespace detail {

/// OH on `path` using the empty scratch path `aux`: an O-CPS moves l = -1
/// into aux, a mirror brings it to l = +1, the BS acts as a Hadamard on the
/// path qubit, and the mirror/O-CPS pair maps it back.
inline std::vector<Element> oh_bare(Photon p, const std::string& path, const std::string& aux, double phi_in,
                                    double phi_out) {
  const std::string tag(kCalibrationTag);
  std::vector<Element> seq = o_cps_decompose(p, path, aux);
  seq.push_back(Element::mirror(p, {aux}));
  seq.push_back(Element::phase_plate(p, {aux}, phi_in).tagged(tag));
  seq.push_back(Element::beam_splitter(p, path, aux));
  seq.push_back(Element::phase_plate(p, {aux}, phi_out).tagged(tag));
  seq.push_back(Element::mirror(p, {aux}));
  const auto back = o_cps_decompose(p, path, aux);
  seq.insert(seq.end(), back.begin(), back.end());
  return seq;
}

}  // namespace detail

struct OhCalibration {
  double input_phase_aux = 0.0;   // before the BS, on the scratch path
  double output_phase_aux = 0.0;  // after the BS, on the scratch path
  cplx global_phase{1.0, 0.0};
};

inline OhCalibration solve_oh_calibration() {
  const SpacePtr space = make_space(3, {"x", "aux"});
  const auto bare = detail::oh_bare(Photon::A, "x", "aux", 0.0, 0.0);
  const BasisMode plus = make_mode(*space, Polarization::H, +1, "x");
  const BasisMode minus = make_mode(*space, Polarization::H, -1, "x");
  auto column = [&](const BasisMode& in) {
    const PhotonState out = apply_all<PhotonState>(bare, PhotonState(space, {{in, 1.0}}));
    if (std::abs(out.norm_squared() - 1.0) > 1e-12 ||
        std::abs(std::norm(out.amplitude(plus)) + std::norm(out.amplitude(minus)) - 1.0) > 1e-12) {
      throw Error(ErrorKind::CalibrationFailure, "OH interferometer leaks into the scratch path");
    }
    return std::pair{out.amplitude(plus), out.amplitude(minus)};
  };
  const auto [m11, m21] = column(plus);
  const auto [m12, m22] = column(minus);
  for (cplx m : {m11, m12, m21, m22}) {
    if (std::abs(std::abs(m) - kInvSqrt2) > 1e-12)
      throw Error(ErrorKind::CalibrationFailure, "OH interferometer is not balanced");
  }
  const cplx b = m11 / m12;  // scales the column fed from l = -1
  const cplx a = m11 / m21;  // scales the row that leaves as l = -1
  if (std::abs(m22 * a * b + m11) > 1e-12)
    throw Error(ErrorKind::CalibrationFailure, "OH phases cannot be reconciled with scratch-path plates");
  return {detail::snap_angle(std::arg(b)), detail::snap_angle(std::arg(a)), m11 / kInvSqrt2};
}

inline const OhCalibration& oh_calibration() {
  static const OhCalibration cal = solve_oh_calibration();
  return cal;
}

/// Element-level OH on each listed path; `aux` must be empty before and is
/// empty after.
inline std::vector<Element> oh_decompose(Photon p, const std::vector<std::string>& site, const std::string& aux) {
  const auto& cal = oh_calibration();
  std::vector<Element> seq;
  for (const auto& path : site) {
    if (path == aux) throw Error(ErrorKind::SamePath, "OH scratch path coincides with its site");
    const auto one = detail::oh_bare(p, path, aux, cal.input_phase_aux, cal.output_phase_aux);
    seq.insert(seq.end(), one.begin(), one.end());
  }
  return seq;
}

/// DP(-pi/4) followed by PP(pi) on the outgoing l = +1 component, which
/// turns i e^{-i pi l / 2}|-l> into the phase-free flip on l = +1, -1.
inline std::vector<Element> dp_stage_decompose(Photon p, const std::vector<std::string>& site) {
  return {
      Element::dove(p, site, -kPi / 4.0),
      Element::phase_plate(p, site, kPi, std::nullopt, +1).tagged(std::string(kCalibrationTag)),
  };
}

// Equivalence checking.

using GateImpl = std::function<PhotonState(const PhotonState&)>;

inline GateImpl as_impl(std::vector<Operation> ops) {
  return [ops = std::move(ops)](const PhotonState& s) { return apply_all<PhotonState>(ops, s); };
}

inline GateImpl as_impl(std::vector<Element> ops) {
  return [ops = std::move(ops)](const PhotonState& s) { return apply_all<PhotonState>(ops, s); };
}

inline GateImpl as_impl(GateOp g) {
  return [g = std::move(g)](const PhotonState& s) { return apply(g, s); };
}

struct EquivResult {
  bool equivalent = false;
  double max_deviation = 0.0;  // max |U_A - c U_B| over domain columns
  cplx phase{1.0, 0.0};        // the scalar c
};

/// True iff U_A = c U_B for one unit scalar c over `domain`. c is taken from
/// the largest entry of the first column where both are nonzero.
inline EquivResult gate_equiv(const GateImpl& a, const GateImpl& b, const SpacePtr& space,
                              std::span<const BasisMode> domain, double tol) {
  EquivResult r;
  bool have_phase = false;
  for (const BasisMode& in : domain) {
    const PhotonState input(space, {{in, 1.0}});
    const PhotonState ua = a(input);
    const PhotonState ub = b(input);
    if (!(ua.space() == ub.space()))
      throw Error(ErrorKind::DimensionMismatch, "gates produce states in different mode spaces");
    if (!have_phase) {
      const std::pair<const BasisMode, cplx>* best = nullptr;
      for (const auto& kv : ub.amplitudes())
        if (!best || std::abs(kv.second) > std::abs(best->second)) best = &kv;
      if (best && std::abs(ua.amplitude(best->first)) > 1e-9) {
        const cplx ratio = ua.amplitude(best->first) / best->second;
        r.phase = ratio / std::abs(ratio);
        have_phase = true;
      }
    }
    PhotonState::Map diff = ua.amplitudes();
    for (const auto& [m, x] : ub.amplitudes()) diff[m] -= r.phase * x;
    for (const auto& [m, x] : diff) r.max_deviation = std::max(r.max_deviation, std::abs(x));
  }
  r.equivalent = r.max_deviation <= tol;
  return r;
}

/// Every (pol, l, path) with l in range on the site where P-COS(q) keeps the
/// shifted OAM in range.
inline std::vector<BasisMode> p_cos_domain(const ModeSpace& space, const std::vector<std::string>& site,
                                           int twice_q) {
  std::vector<BasisMode> out;
  for (const auto& p : site) {
    const PathId id = space.path_id(p);
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      const int shift = pol == Polarization::H ? twice_q : -twice_q;
      for (int l = -space.lmax(); l <= space.lmax(); ++l) {
        if (space.in_range(l + shift) && space.in_range(l - shift)) out.push_back({pol, l, id});
      }
    }
  }
  return out;
}

/// (pol, l = +-1, path) over the site.
inline std::vector<BasisMode> pm1_domain(const ModeSpace& space, const std::vector<std::string>& site) {
  std::vector<BasisMode> out;
  for (const auto& p : site) {
    const PathId id = space.path_id(p);
    for (Polarization pol : {Polarization::H, Polarization::V})
      for (int l : {+1, -1}) out.push_back({pol, l, id});
  }
  return out;
}

// Row-wise OH realization with a polarization projector.

struct OhRow {
  Polarization pol;
  int oam;
  std::vector<Element> sequence;  // ends before the PBS projector
  Polarization projector;         // the PBS output port kept
  int relative_sign;              // expected output (|p,+1> + sign |p,-1>)/sqrt2
};

struct OhRowResult {
  int row = 0;                        // 1-based
  std::string input;
  double fidelity = 0.0;              // vs the row's output column
  double residual_phase = 0.0;        // arg <expected|actual>
  double branch_probability = 0.0;    // weight transmitted by the projector
  bool pass = false;
};

/// The four rows: QP(1/2), SPP(-1 for l=+1 / +1 for l=-1), QWP(-pi/4),
/// HWP(pi/8), HWP(pi/4) on the l=-1 rows, then a calibration PP(-pi/2) on
/// l = -1 and the polarization projector.
inline std::vector<OhRow> oh_rows() {
  const std::vector<std::string> s{"x"};
  const Photon a = Photon::A;
  std::vector<OhRow> rows;
  for (int oam : {+1, -1}) {
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      std::vector<Element> seq{Element::qplate(a, s, 0.5), Element::spp(a, s, oam == 1 ? -1 : +1),
                               Element::qwp(a, s), Element::hwp(a, s, kPi / 8.0)};
      if (oam == -1) seq.push_back(Element::hwp(a, s, kPi / 4.0));
      seq.push_back(Element::phase_plate(a, s, -kPi / 2.0, std::nullopt, -1).tagged(std::string(kCalibrationTag)));
      rows.push_back({pol, oam, std::move(seq), pol, oam == 1 ? +1 : -1});
    }
  }
  return rows;
}

inline std::vector<OhRowResult> oh_validate_table1(double tol = 1e-12) {
  const SpacePtr space = make_space(kDefaultLmax, {"x"});
  std::vector<OhRowResult> out;
  int index = 0;
  for (const auto& row : oh_rows()) {
    OhRowResult r;
    r.row = ++index;
    const PhotonState in = basis_state(space, row.pol, row.oam, "x");
    r.input = space->describe(in.amplitudes().begin()->first);
    const PhotonState evolved = apply_all<PhotonState>(row.sequence, in);
    PhotonState::Map kept;
    for (const auto& [m, x] : evolved.amplitudes())
      if (m.pol == row.projector) kept.emplace(m, x);
    const PhotonState projected(space, std::move(kept));
    r.branch_probability = projected.norm_squared();
    const PhotonState expected = superpose<BasisMode>({
        {1.0, basis_state(space, row.pol, +1, "x")},
        {static_cast<double>(row.relative_sign), basis_state(space, row.pol, -1, "x")},
    });
    if (r.branch_probability > 0.0) {
      const PhotonState actual = projected.normalized();
      const cplx overlap = inner(expected, actual);
      r.fidelity = std::norm(overlap);
      r.residual_phase = detail::arg_or_zero(overlap);
    }
    r.pass = r.fidelity >= 1.0 - tol;
    out.push_back(r);
  }
  return out;
}

// O-CPS interferometer walkthrough.

struct OcpsTrace {
  PhotonState input;            // (|p,+1> + |p,-1>)|in>/sqrt2
  PhotonState after_spp;        // after the input SPP(+1)
  PhotonState after_second_bs;  // after the second BS and its calibration plate
  PhotonState output;           // after the full calibrated sequence
};

/// Pushes the superposition through the calibrated O-CPS on local paths a, b.
inline OcpsTrace ocps_walkthrough(Polarization p, const std::string& input_path) {
  const SpacePtr space = make_space(3, {"a", "b"});
  const auto seq = o_cps_decompose(Photon::A, "a", "b");
  const PhotonState in = superpose<BasisMode>({{1.0, basis_state(space, p, +1, input_path)},
                                               {1.0, basis_state(space, p, -1, input_path)}});
  PhotonState s = in;
  PhotonState after_spp = in, after_bs = in;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    s = hbsa::apply(seq[i], s);
    if (i == 0) after_spp = s;
    if (i + 2 == seq.size()) after_bs = s;  // everything but the closing SPP(-1)
  }
  return {in, after_spp, after_bs, s};
}

// Catalog for the `describe` command.

struct GateSpec {
  std::string name;
  std::string canonical;
  std::vector<Element> decomposition;
  cplx global_phase{1.0, 0.0};
};

inline std::vector<GateSpec> gate_catalog() {
  const Photon a = Photon::A;
  return {
      {"P_COS", "|H,l> -> |H,l+2q>, |V,l> -> |V,l-2q>", p_cos_decompose(a, {"x"}, 1), {1.0, 0.0}},
      {"O_CPS", "|+1>|x> -> |+1>|x>, |-1>|x> -> |-1>|y>, |+1>|y> -> |+1>|y>, |-1>|y> -> |-1>|x>",
       o_cps_decompose(a, "x", "y"), ocps_calibration().global_phase},
      {"OH", "|+1> -> (|+1> + |-1>)/sqrt2, |-1> -> (|+1> - |-1>)/sqrt2", oh_decompose(a, {"x"}, "aux"),
       oh_calibration().global_phase},
      {"DP_STAGE", "|l> -> |-l> on l = +1, -1", dp_stage_decompose(a, {"x"}), {1.0, 0.0}},
      {"SPPM_FRONT", "|H,+1> -> c, |H,-1> -> c-, |V,+1> -> d, |V,-1> -> d-",
       {Element::pbs(a, "c", "d"), Element::oam_sorter(a, "c", "c-"), Element::oam_sorter(a, "d", "d-")},
       {1.0, 0.0}},
  };
}

}  // namespace hbsa
