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

// Primitive linear-optical elements acting on one photon.
//
// Every element is described by its action on a single basis mode (a
// "mode image" of at most four terms). States are updated by accumulating
// mode images, so interference is exact up to floating rounding and OAM
// bounds are only enforced on amplitudes that survive accumulation.
//
// Phase conventions:
//   QWP(-pi/4)      (1/sqrt2)[[1, i], [i, 1]] in the {H, V} basis
//   HWP(theta)      [[cos 2t, sin 2t], [sin 2t, -cos 2t]]
//   QP(q)           |L,l> -> |R,l+2q>, |R,l> -> |L,l-2q>
//   DP(alpha)       |l> -> i e^{i 2 alpha l} |-l>
//   mirror          |l> -> i |-l>
//   BS(x, y)        |x> -> (|x> + i|y>)/sqrt2, |y> -> (i|x> + |y>)/sqrt2
//   PBS(x, y)       H keeps its path, V changes path, unit phases
//   OAM sorter      l = +1 keeps its path, l = -1 changes path

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hbsa/state.hpp"

namespace hbsa {

enum class ElementKind {
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
};

inline std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Qwp: return "QWP";
    case ElementKind::Hwp: return "HWP";
    case ElementKind::QPlate: return "QP";
    case ElementKind::Spp: return "SPP";
    case ElementKind::DovePrism: return "DP";
    case ElementKind::PhasePlate: return "PP";
    case ElementKind::Mirror: return "MIRROR";
    case ElementKind::BeamSplitter: return "BS";
    case ElementKind::Pbs: return "PBS";
    case ElementKind::OamSorter: return "OAMSORTER";
  }
  return "?";
}

inline bool is_two_path(ElementKind k) {
  return k == ElementKind::BeamSplitter || k == ElementKind::Pbs || k == ElementKind::OamSorter;
}

/// A placed primitive element. Single-path kinds act independently on every
/// listed path; two-path kinds act on exactly the ordered pair (x, y).
struct Element {
  ElementKind kind = ElementKind::PhasePlate;
  Photon photon = Photon::A;
  std::vector<std::string> paths;
  double angle = 0.0;  // HWP theta, DP alpha (radians)
  int twice_q = 0;     // QP topological charge times two
  int shift = 0;       // SPP OAM shift
  double phase = 0.0;  // PP phi (radians)
  std::optional<Polarization> pol_filter;  // PP acts only on this polarization
  std::optional<int> oam_filter;           // PP acts only on this OAM value
  std::string tag;                         // "calibration" for reconciliation plates

  friend bool operator==(const Element&, const Element&) = default;

  static Element qwp(Photon p, std::vector<std::string> paths) {
    return make(ElementKind::Qwp, p, std::move(paths));
  }
  static Element hwp(Photon p, std::vector<std::string> paths, double theta) {
    Element e = make(ElementKind::Hwp, p, std::move(paths));
    e.angle = theta;
    return e;
  }
  /// Throws NonPhysicalQ unless 2q is an integer.
  static Element qplate(Photon p, std::vector<std::string> paths, double q) {
    const double twice = 2.0 * q;
    if (std::abs(twice - std::round(twice)) > 1e-12)
      throw Error(ErrorKind::NonPhysicalQ, "q-plate charge 2q must be an integer");
    Element e = make(ElementKind::QPlate, p, std::move(paths));
    e.twice_q = static_cast<int>(std::lround(twice));
    return e;
  }
  static Element spp(Photon p, std::vector<std::string> paths, int l) {
    Element e = make(ElementKind::Spp, p, std::move(paths));
    e.shift = l;
    return e;
  }
  static Element dove(Photon p, std::vector<std::string> paths, double alpha) {
    Element e = make(ElementKind::DovePrism, p, std::move(paths));
    e.angle = alpha;
    return e;
  }
  static Element phase_plate(Photon p, std::vector<std::string> paths, double phi,
                             std::optional<Polarization> pol = std::nullopt,
                             std::optional<int> oam = std::nullopt) {
    Element e = make(ElementKind::PhasePlate, p, std::move(paths));
    e.phase = phi;
    e.pol_filter = pol;
    e.oam_filter = oam;
    return e;
  }
  static Element mirror(Photon p, std::vector<std::string> paths) {
    return make(ElementKind::Mirror, p, std::move(paths));
  }
  static Element beam_splitter(Photon p, std::string x, std::string y) {
    return make(ElementKind::BeamSplitter, p, {std::move(x), std::move(y)});
  }
  static Element pbs(Photon p, std::string x, std::string y) {
    return make(ElementKind::Pbs, p, {std::move(x), std::move(y)});
  }
  static Element oam_sorter(Photon p, std::string x, std::string y) {
    return make(ElementKind::OamSorter, p, {std::move(x), std::move(y)});
  }

  Element tagged(std::string t) const {
    Element e = *this;
    e.tag = std::move(t);
    return e;
  }

 private:
  static Element make(ElementKind kind, Photon p, std::vector<std::string> paths) {
    Element e;
    e.kind = kind;
    e.photon = p;
    e.paths = std::move(paths);
    return e;
  }
};

inline std::string describe(const Element& e);

/// Image of one basis mode under a linear map; at most four terms.
class ModeImage {
 public:
  void add(BasisMode m, cplx a) {
    if (std::abs(a) <= kDropThreshold) return;
    for (int i = 0; i < size_; ++i) {
      if (terms_[i].first == m) {
        terms_[i].second += a;
        return;
      }
    }
    terms_[size_++] = {m, a};
  }
  const std::pair<BasisMode, cplx>* begin() const { return terms_.data(); }
  const std::pair<BasisMode, cplx>* end() const { return terms_.data() + size_; }
  int size() const { return size_; }

  static ModeImage identity(const BasisMode& m) {
    ModeImage img;
    img.add(m, 1.0);
    return img;
  }

 private:
  std::array<std::pair<BasisMode, cplx>, 4> terms_{};
  int size_ = 0;
};

namespace detail {

/// Drops interference residue and enforces the OAM bound on what survives.
template <typename Map, typename OamOf>
void finish_accumulation(Map& acc, const ModeSpace& space, OamOf&& oams_of) {
  for (auto it = acc.begin(); it != acc.end();) {
    const double mag = std::abs(it->second);
    bool out_of_range = false;
    for (int l : oams_of(it->first)) out_of_range = out_of_range || !space.in_range(l);
    if (mag <= kDropThreshold || (out_of_range && mag <= 1e-12)) {
      it = acc.erase(it);
      continue;
    }
    if (out_of_range) {
      for (int l : oams_of(it->first)) space.check_oam(l);
    }
    ++it;
  }
}

}  // namespace detail

/// Applies a mode action (BasisMode -> ModeImage) to a one-photon state.
template <typename Action>
PhotonState apply_action(const PhotonState& s, Action&& act) {
  PhotonState::Map acc;
  for (const auto& [m, a] : s.amplitudes()) {
    for (const auto& [m2, c] : act(m)) acc[m2] += a * c;
  }
  detail::finish_accumulation(acc, s.space(), [](const BasisMode& m) { return std::array<int, 1>{m.oam}; });
  return PhotonState(s.space_ptr(), std::move(acc));
}

/// Applies a mode action to one photon of a pair, leaving the other alone.
template <typename Action>
TwoPhotonState apply_action(const TwoPhotonState& s, Photon which, Action&& act) {
  TwoPhotonState::Map acc;
  for (const auto& [k, a] : s.amplitudes()) {
    const BasisMode& target = which == Photon::A ? k.a : k.b;
    for (const auto& [m2, c] : act(target)) {
      ModePair out = k;
      (which == Photon::A ? out.a : out.b) = m2;
      acc[out] += a * c;
    }
  }
  detail::finish_accumulation(acc, s.space(),
                              [](const ModePair& k) { return std::array<int, 2>{k.a.oam, k.b.oam}; });
  return TwoPhotonState(s.space_ptr(), std::move(acc));
}

/// Site of an element resolved against a mode space.
struct ResolvedSite {
  std::vector<PathId> ids;
  bool contains(PathId p) const {
    for (PathId id : ids)
      if (id == p) return true;
    return false;
  }
};

/// Checks parameter completeness and path placement against `space`.
inline ResolvedSite resolve(const Element& e, const ModeSpace& space) {
  ResolvedSite site;
  if (e.paths.empty()) throw Error(ErrorKind::InvalidArgument, describe(e) + " has no paths");
  for (const auto& name : e.paths) site.ids.push_back(space.path_id(name));
  if (is_two_path(e.kind)) {
    if (site.ids.size() != 2)
      throw Error(ErrorKind::InvalidArgument, describe(e) + " needs exactly two paths");
    if (site.ids[0] == site.ids[1])
      throw Error(ErrorKind::SamePath, describe(e) + " references path '" + e.paths[0] + "' twice");
  }
  return site;
}

namespace jones {

/// Column `in` of a 2x2 polarization matrix written row-major.
inline void add_column(ModeImage& img, const BasisMode& m, const std::array<cplx, 4>& mat) {
  const int col = static_cast<int>(m.pol);
  BasisMode h = m;
  h.pol = Polarization::H;
  BasisMode v = m;
  v.pol = Polarization::V;
  img.add(h, mat[0 * 2 + col]);
  img.add(v, mat[1 * 2 + col]);
}

inline std::array<cplx, 4> qwp() {
  return {cplx{kInvSqrt2, 0}, cplx{0, kInvSqrt2}, cplx{0, kInvSqrt2}, cplx{kInvSqrt2, 0}};
}

inline std::array<cplx, 4> hwp(double theta) {
  const cplx c = unit_phase(2.0 * theta).real();
  const cplx s = unit_phase(2.0 * theta).imag();
  return {c, s, s, -c};
}

}  // namespace jones

/// The mode action of a placed element. Modes on other paths pass unchanged.
inline auto mode_action(const Element& e, const ModeSpace& space) {
  ResolvedSite site = resolve(e, space);
  return [e, site, &space](const BasisMode& m) -> ModeImage {
    if (!site.contains(m.path)) return ModeImage::identity(m);
    ModeImage img;
    switch (e.kind) {
      case ElementKind::Qwp:
        jones::add_column(img, m, jones::qwp());
        break;
      case ElementKind::Hwp:
        jones::add_column(img, m, jones::hwp(e.angle));
        break;
      case ElementKind::QPlate: {
        // Circular components <L|p>, <R|p>, then L -> R(l+2q), R -> L(l-2q).
        const bool h = m.pol == Polarization::H;
        const cplx to_left = h ? cplx{kInvSqrt2, 0} : cplx{0, -kInvSqrt2};
        const cplx to_right = h ? cplx{kInvSqrt2, 0} : cplx{0, kInvSqrt2};
        BasisMode up{Polarization::H, m.oam + e.twice_q, m.path};
        BasisMode down{Polarization::H, m.oam - e.twice_q, m.path};
        // |R> = (|H> - i|V>)/sqrt2 at l+2q
        img.add(up, to_left * kInvSqrt2);
        up.pol = Polarization::V;
        img.add(up, to_left * cplx{0, -kInvSqrt2});
        // |L> = (|H> + i|V>)/sqrt2 at l-2q
        img.add(down, to_right * kInvSqrt2);
        down.pol = Polarization::V;
        img.add(down, to_right * cplx{0, kInvSqrt2});
        break;
      }
      case ElementKind::Spp:
        img.add(BasisMode{m.pol, m.oam + e.shift, m.path}, 1.0);
        break;
      case ElementKind::DovePrism:
        img.add(BasisMode{m.pol, -m.oam, m.path}, cplx{0, 1} * unit_phase(2.0 * e.angle * m.oam));
        break;
      case ElementKind::PhasePlate: {
        const bool hit = (!e.pol_filter || *e.pol_filter == m.pol) && (!e.oam_filter || *e.oam_filter == m.oam);
        img.add(m, hit ? unit_phase(e.phase) : cplx{1.0, 0.0});
        break;
      }
      case ElementKind::Mirror:
        img.add(BasisMode{m.pol, -m.oam, m.path}, cplx{0, 1});
        break;
      case ElementKind::BeamSplitter: {
        const PathId other = m.path == site.ids[0] ? site.ids[1] : site.ids[0];
        img.add(m, kInvSqrt2);
        img.add(BasisMode{m.pol, m.oam, other}, cplx{0, kInvSqrt2});
        break;
      }
      case ElementKind::Pbs: {
        const PathId other = m.path == site.ids[0] ? site.ids[1] : site.ids[0];
        img.add(m.pol == Polarization::H ? m : BasisMode{m.pol, m.oam, other}, 1.0);
        break;
      }
      case ElementKind::OamSorter: {
        if (m.oam != 1 && m.oam != -1) {
          throw Error(ErrorKind::UnsortableOam, "OAM sorter received l = " + std::to_string(m.oam) + " on " +
                                                    space.describe(m));
        }
        const PathId other = m.path == site.ids[0] ? site.ids[1] : site.ids[0];
        img.add(m.oam == 1 ? m : BasisMode{m.pol, m.oam, other}, 1.0);
        break;
      }
    }
    return img;
  };
}

inline PhotonState apply(const Element& e, const PhotonState& s) {
  return apply_action(s, mode_action(e, s.space()));
}

inline TwoPhotonState apply(const Element& e, const TwoPhotonState& s) {
  return apply_action(s, e.photon, mode_action(e, s.space()));
}

// Named entry points, one per primitive.

inline PhotonState apply_qwp(const PhotonState& s, std::vector<std::string> site) {
  return apply(Element::qwp(Photon::A, std::move(site)), s);
}
inline PhotonState apply_hwp(const PhotonState& s, double theta, std::vector<std::string> site) {
  return apply(Element::hwp(Photon::A, std::move(site), theta), s);
}
inline PhotonState apply_qp(const PhotonState& s, double q, std::vector<std::string> site) {
  return apply(Element::qplate(Photon::A, std::move(site), q), s);
}
inline PhotonState apply_spp(const PhotonState& s, int l, std::vector<std::string> site) {
  return apply(Element::spp(Photon::A, std::move(site), l), s);
}
inline PhotonState apply_dp(const PhotonState& s, double alpha, std::vector<std::string> site) {
  return apply(Element::dove(Photon::A, std::move(site), alpha), s);
}
inline PhotonState apply_pp(const PhotonState& s, double phi, std::vector<std::string> site,
                            std::optional<Polarization> pol = std::nullopt, std::optional<int> oam = std::nullopt) {
  return apply(Element::phase_plate(Photon::A, std::move(site), phi, pol, oam), s);
}
inline PhotonState apply_mirror(const PhotonState& s, std::vector<std::string> site) {
  return apply(Element::mirror(Photon::A, std::move(site)), s);
}
inline PhotonState apply_bs(const PhotonState& s, std::string x, std::string y) {
  return apply(Element::beam_splitter(Photon::A, std::move(x), std::move(y)), s);
}
inline PhotonState apply_pbs(const PhotonState& s, std::string x, std::string y) {
  return apply(Element::pbs(Photon::A, std::move(x), std::move(y)), s);
}
inline PhotonState apply_oam_sorter(const PhotonState& s, std::string x, std::string y) {
  return apply(Element::oam_sorter(Photon::A, std::move(x), std::move(y)), s);
}

namespace detail {

inline std::string format_angle(double x) {
  // Multiples of pi/n for small n print symbolically.
  if (x == 0.0) return "0";
  for (int den : {1, 2, 3, 4, 6, 8, 12, 16, 32, 64}) {
    const double num = x * den / kPi;
    const double r = std::round(num);
    if (std::abs(num - r) < 1e-12 && r != 0.0) {
      const long long n = std::llround(r);
      std::string out = n < 0 ? "-" : "";
      const long long an = n < 0 ? -n : n;
      if (an != 1) out += std::to_string(an) + "*";
      out += "pi";
      if (den != 1) out += "/" + std::to_string(den);
      return out;
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string format_half_integer(int twice) {
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

inline std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

}  // namespace detail

inline std::string describe(const Element& e) {
  std::string out(to_string(e.kind));
  switch (e.kind) {
    case ElementKind::Hwp:
    case ElementKind::DovePrism:
      out += "(" + detail::format_angle(e.angle) + ")";
      break;
    case ElementKind::Qwp:
      out += "(-pi/4)";
      break;
    case ElementKind::QPlate:
      out += "(" + detail::format_half_integer(e.twice_q) + ")";
      break;
    case ElementKind::Spp:
      out += "(" + std::string(e.shift > 0 ? "+" : "") + std::to_string(e.shift) + ")";
      break;
    case ElementKind::PhasePlate:
      out += "(" + detail::format_angle(e.phase);
      if (e.pol_filter) out += ", " + std::string(to_string(*e.pol_filter)) + "-only";
      if (e.oam_filter) out += ", l=" + std::to_string(*e.oam_filter) + "-only";
      out += ")";
      break;
    default:
      break;
  }
  out += " photon=" + std::string(to_string(e.photon)) + " paths=" + detail::join(e.paths, ",");
  if (!e.tag.empty()) out += " [" + e.tag + "]";
  return out;
}

}  // namespace hbsa
