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

// Spin-orbit photonic measurement (SPPM): each origin path feeds a PBS
// followed by an OAM sorter on each output, giving four detectors
// labelled by (OAM sign, polarization, origin).

#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "hbsa/circuit.hpp"

namespace hbsa {

struct DetectorId {
  int oam_sign = +1;
  Polarization pol = Polarization::H;
  std::string origin;

  friend bool operator==(const DetectorId&, const DetectorId&) = default;
  friend auto operator<=>(const DetectorId&, const DetectorId&) = default;
};

/// "D[+1,H,a1]"
inline std::string to_string(const DetectorId& d) {
  return std::string("D[") + (d.oam_sign > 0 ? "+1," : "-1,") + std::string(to_string(d.pol)) + "," + d.origin + "]";
}

struct CoincidencePattern {
  DetectorId a;
  DetectorId b;

  friend bool operator==(const CoincidencePattern&, const CoincidencePattern&) = default;
  friend auto operator<=>(const CoincidencePattern&, const CoincidencePattern&) = default;
};

/// "D[+1,H,a1] & D[-1,V,a2]"
inline std::string to_string(const CoincidencePattern& p) { return to_string(p.a) + " & " + to_string(p.b); }

/// Inverse of to_string(DetectorId). Throws MalformedPattern.
inline DetectorId parse_detector(std::string_view s) {
  auto bad = [&]() -> Error {
    return Error(ErrorKind::MalformedPattern, "bad detector '" + std::string(s) + "' (expected D[+1|-1,H|V,path])");
  };
  if (s.size() < 9 || s.substr(0, 2) != "D[" || s.back() != ']') throw bad();
  const std::string_view body = s.substr(2, s.size() - 3);
  const auto c1 = body.find(',');
  const auto c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
  if (c2 == std::string_view::npos) throw bad();
  const auto sign = body.substr(0, c1);
  const auto pol = body.substr(c1 + 1, c2 - c1 - 1);
  const auto origin = body.substr(c2 + 1);
  DetectorId d;
  if (sign == "+1") d.oam_sign = +1;
  else if (sign == "-1") d.oam_sign = -1;
  else throw bad();
  if (pol == "H") d.pol = Polarization::H;
  else if (pol == "V") d.pol = Polarization::V;
  else throw bad();
  if (origin.empty() || origin.find_first_of(", []&") != std::string_view::npos) throw bad();
  d.origin = std::string(origin);
  return d;
}

inline CoincidencePattern parse_pattern(std::string_view s) {
  const auto amp = s.find(" & ");
  if (amp == std::string_view::npos)
    throw Error(ErrorKind::MalformedPattern, "bad pattern '" + std::string(s) + "' (expected 'D[..] & D[..]')");
  return {parse_detector(s.substr(0, amp)), parse_detector(s.substr(amp + 3))};
}

/// Detectors behind a list of origins: origin in list order, then H before
/// V, then OAM sign +1 before -1.
inline std::vector<DetectorId> enumerate_detectors(const std::vector<std::string>& origins) {
  std::vector<DetectorId> out;
  for (const auto& o : origins)
    for (Polarization p : {Polarization::H, Polarization::V})
      for (int sign : {+1, -1}) out.push_back({sign, p, o});
  return out;
}

/// Every coincidence pattern, photon A detector as the major key.
inline std::vector<CoincidencePattern> enumerate_patterns(const std::vector<std::string>& origins_a,
                                                          const std::vector<std::string>& origins_b) {
  std::vector<CoincidencePattern> out;
  const auto da = enumerate_detectors(origins_a);
  const auto db = enumerate_detectors(origins_b);
  for (const auto& a : da)
    for (const auto& b : db) out.push_back({a, b});
  return out;
}

/// Probabilities in enumerate_patterns order.
class OutcomeDistribution {
 public:
  OutcomeDistribution() = default;
  OutcomeDistribution(std::vector<std::string> origins_a, std::vector<std::string> origins_b)
      : origins_a_(std::move(origins_a)),
        origins_b_(std::move(origins_b)),
        patterns_(enumerate_patterns(origins_a_, origins_b_)),
        probs_(patterns_.size(), 0.0) {
    for (std::size_t i = 0; i < patterns_.size(); ++i) index_.emplace(patterns_[i], i);
  }

  const std::vector<CoincidencePattern>& patterns() const noexcept { return patterns_; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  const std::vector<std::string>& origins(Photon p) const noexcept {
    return p == Photon::A ? origins_a_ : origins_b_;
  }

  double probability(const CoincidencePattern& p) const {
    auto it = index_.find(p);
    return it == index_.end() ? 0.0 : probs_[it->second];
  }

  void add(const CoincidencePattern& p, double prob) {
    auto it = index_.find(p);
    if (it == index_.end())
      throw Error(ErrorKind::InvalidArgument, "pattern " + to_string(p) + " is not in this distribution");
    probs_[it->second] += prob;
  }

  double total() const {
    double t = 0;
    for (double p : probs_) t += p;
    return t;
  }

  /// Patterns whose probability exceeds `threshold`, in enumeration order.
  std::vector<CoincidencePattern> support(double threshold = 1e-12) const {
    std::vector<CoincidencePattern> out;
    for (std::size_t i = 0; i < probs_.size(); ++i)
      if (probs_[i] > threshold) out.push_back(patterns_[i]);
    return out;
  }

 private:
  std::vector<std::string> origins_a_;
  std::vector<std::string> origins_b_;
  std::vector<CoincidencePattern> patterns_;
  std::vector<double> probs_;
  std::map<CoincidencePattern, std::size_t> index_;
};

/// Sum over patterns of |p - q|, halved.
inline double total_variation(const OutcomeDistribution& x, const OutcomeDistribution& y) {
  std::map<CoincidencePattern, double> diff;
  for (std::size_t i = 0; i < x.patterns().size(); ++i) diff[x.patterns()[i]] += x.probabilities()[i];
  for (std::size_t i = 0; i < y.patterns().size(); ++i) diff[y.patterns()[i]] -= y.probabilities()[i];
  double tv = 0;
  for (const auto& [p, d] : diff) tv += std::abs(d);
  return tv / 2;
}

/// Fixed 12-decimal rendering used in every report.
inline std::string format_probability(double p) {
  if (std::abs(p) < 5e-13) p = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12f", p);
  return buf;
}

enum class SppmMethod { Direct, Decomposed };

/// Amplitudes below this at a non-origin path are numerical noise.
inline constexpr double kLeakThreshold = 1e-12;

namespace detail {

inline int origin_index(const std::vector<std::string>& origins, const std::string& path) {
  for (std::size_t i = 0; i < origins.size(); ++i)
    if (origins[i] == path) return static_cast<int>(i);
  return -1;
}

inline void check_measurable(const ModeSpace& space, const BasisMode& m, Photon which,
                             const std::vector<std::string>& origins) {
  const std::string& path = space.path_name(m.path);
  if (origin_index(origins, path) < 0)
    throw Error(ErrorKind::LeakedAmplitude, "photon " + std::string(to_string(which)) + " has amplitude at " +
                                                space.describe(m) + ", outside the measured paths");
  if (m.oam != 1 && m.oam != -1)
    throw Error(ErrorKind::UnsortableOam,
                "SPPM cannot sort " + space.describe(m) + " (requires l = +1 or -1)");
}

/// Local optical network of one SPPM: input on port c, PBS(c,d), then an
/// OAM sorter on each PBS output. Returns (detector, output amplitude)
/// pairs keyed by the local output mode.
struct LocalImage {
  DetectorId detector;
  BasisMode local_mode;
  cplx amplitude;
};

inline std::vector<LocalImage> sppm_network(const BasisMode& m, const std::string& origin, int lmax) {
  static const std::vector<std::string> ports{"c", "d", "c-", "d-"};
  auto local = make_space(lmax, ports);
  PhotonState s = basis_state(local, m.pol, m.oam, "c");
  s = hbsa::apply(Element::pbs(Photon::A, "c", "d"), s);
  s = hbsa::apply(Element::oam_sorter(Photon::A, "c", "c-"), s);
  s = hbsa::apply(Element::oam_sorter(Photon::A, "d", "d-"), s);
  std::vector<LocalImage> out;
  for (const auto& [mode, amp] : s.amplitudes()) {
    const std::string& port = local->path_name(mode.path);
    DetectorId d;
    d.origin = origin;
    d.pol = port[0] == 'c' ? Polarization::H : Polarization::V;
    d.oam_sign = port.size() == 1 ? +1 : -1;
    out.push_back({d, mode, amp});
  }
  return out;
}

}  // namespace detail

/// Coincidence distribution of a two-photon state measured by SPPMs at the
/// given origins. Direct sums Born weights by detector label; Decomposed
/// routes each mode through the PBS and sorter network and reads the
/// output ports. Both throw LeakedAmplitude for amplitude outside the
/// origins and UnsortableOam for |l| != 1.
inline OutcomeDistribution sppm_project(const TwoPhotonState& state, const std::vector<std::string>& origins_a,
                                        const std::vector<std::string>& origins_b,
                                        SppmMethod method = SppmMethod::Direct) {
  OutcomeDistribution dist(origins_a, origins_b);
  const ModeSpace& space = state.space();
  for (const auto& [pair, amp] : state.amplitudes()) {
    if (std::abs(amp) <= kLeakThreshold) continue;
    detail::check_measurable(space, pair.a, Photon::A, origins_a);
    detail::check_measurable(space, pair.b, Photon::B, origins_b);
  }

  if (method == SppmMethod::Direct) {
    for (const auto& [pair, amp] : state.amplitudes()) {
      if (std::abs(amp) <= kLeakThreshold) continue;
      const DetectorId a{pair.a.oam > 0 ? +1 : -1, pair.a.pol, space.path_name(pair.a.path)};
      const DetectorId b{pair.b.oam > 0 ? +1 : -1, pair.b.pol, space.path_name(pair.b.path)};
      dist.add({a, b}, std::norm(amp));
    }
    return dist;
  }

  // Coherent sum over input modes, keyed by (detector, local output mode)
  // for each photon. Distinct keys are orthogonal, so probabilities add.
  using Key = std::pair<std::pair<DetectorId, BasisMode>, std::pair<DetectorId, BasisMode>>;
  std::map<Key, cplx> out;
  for (const auto& [pair, amp] : state.amplitudes()) {
    if (std::abs(amp) <= kLeakThreshold) continue;
    const auto ia = detail::sppm_network(pair.a, space.path_name(pair.a.path), space.lmax());
    const auto ib = detail::sppm_network(pair.b, space.path_name(pair.b.path), space.lmax());
    for (const auto& x : ia)
      for (const auto& y : ib)
        out[{{x.detector, x.local_mode}, {y.detector, y.local_mode}}] += amp * x.amplitude * y.amplitude;
  }
  for (const auto& [key, amp] : out) dist.add({key.first.first, key.second.first}, std::norm(amp));
  return dist;
}

/// Measures `state` with the circuit's SPPM stages.
inline OutcomeDistribution measure(const CompiledCircuit& c, const TwoPhotonState& state,
                                   SppmMethod method = SppmMethod::Direct) {
  return sppm_project(state, c.origins(Photon::A), c.origins(Photon::B), method);
}

}  // namespace hbsa
