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

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbsa/error.hpp"

namespace hbsa {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Amplitudes at or below this magnitude are treated as exact zeros created
/// by interference and dropped from sparse maps.
inline constexpr double kDropThreshold = 1e-15;

/// Default OAM truncation |l| <= 4.
inline constexpr int kDefaultLmax = 4;

/// e^{i phi}, returning exact values when phi is a multiple of pi/2 so that
/// phase bookkeeping through long element chains stays exact.
inline cplx unit_phase(double phi) {
  const double quarter_turns = phi / (kPi / 2.0);
  const double nearest = std::round(quarter_turns);
  if (std::abs(quarter_turns - nearest) < 1e-13) {
    const auto k = static_cast<long long>(nearest);
    switch (((k % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, phi);
}

enum class Polarization : std::uint8_t { H = 0, V = 1 };

inline std::string_view to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }

inline Polarization flipped(Polarization p) {
  return p == Polarization::H ? Polarization::V : Polarization::H;
}

enum class Photon : std::uint8_t { A = 0, B = 1 };

inline std::string_view to_string(Photon p) { return p == Photon::A ? "A" : "B"; }

using PathId = std::uint16_t;

/// One photon's basis mode |pol, l>|path>. Ordered path-major so printed
/// states group by spatial mode.
struct BasisMode {
  Polarization pol = Polarization::H;
  int oam = 0;
  PathId path = 0;

  friend bool operator==(const BasisMode&, const BasisMode&) = default;
  friend auto operator<=>(const BasisMode& x, const BasisMode& y) {
    if (auto c = x.path <=> y.path; c != 0) return c;
    if (auto c = x.pol <=> y.pol; c != 0) return c;
    return y.oam <=> x.oam;
  }
};

/// Truncated single-photon mode space: polarization {H,V} x OAM in
/// [-lmax, lmax] x declared paths. Both photons of a pair share one space.
class ModeSpace {
 public:
  ModeSpace(int lmax, std::vector<std::string> paths) : lmax_(lmax), paths_(std::move(paths)) {
    if (lmax_ < 1) throw Error(ErrorKind::InvalidArgument, "lmax must be >= 1");
    for (std::size_t i = 0; i < paths_.size(); ++i) {
      if (paths_[i].empty()) throw Error(ErrorKind::InvalidArgument, "empty path name");
      for (std::size_t j = 0; j < i; ++j) {
        if (paths_[i] == paths_[j])
          throw Error(ErrorKind::InvalidArgument, "duplicate path '" + paths_[i] + "'");
      }
    }
  }

  int lmax() const noexcept { return lmax_; }
  std::span<const std::string> paths() const noexcept { return paths_; }
  std::size_t path_count() const noexcept { return paths_.size(); }

  std::optional<PathId> find(std::string_view name) const {
    for (std::size_t i = 0; i < paths_.size(); ++i) {
      if (paths_[i] == name) return static_cast<PathId>(i);
    }
    return std::nullopt;
  }

  PathId path_id(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw Error(ErrorKind::UnknownPath, "path '" + std::string(name) + "' is not declared");
  }

  const std::string& path_name(PathId id) const { return paths_.at(id); }

  bool in_range(int oam) const noexcept { return oam >= -lmax_ && oam <= lmax_; }

  void check_oam(int oam) const {
    if (!in_range(oam)) {
      throw Error(ErrorKind::OamOverflow,
                  "OAM " + std::to_string(oam) + " exceeds lmax " + std::to_string(lmax_));
    }
  }

  std::size_t oam_levels() const noexcept { return static_cast<std::size_t>(2 * lmax_ + 1); }

  /// 2 x (2 lmax + 1) x |paths|.
  std::size_t photon_dimension() const noexcept { return 2 * oam_levels() * paths_.size(); }

  /// Dense index, path-major then OAM then polarization.
  std::size_t index(const BasisMode& m) const {
    return (static_cast<std::size_t>(m.path) * oam_levels() + static_cast<std::size_t>(m.oam + lmax_)) * 2 +
           static_cast<std::size_t>(m.pol);
  }

  BasisMode mode_at(std::size_t index) const {
    BasisMode m;
    m.pol = static_cast<Polarization>(index % 2);
    index /= 2;
    m.oam = static_cast<int>(index % oam_levels()) - lmax_;
    m.path = static_cast<PathId>(index / oam_levels());
    return m;
  }

  std::string describe(const BasisMode& m) const {
    std::string out = "|";
    out += to_string(m.pol);
    out += ",";
    if (m.oam > 0) out += "+";
    out += std::to_string(m.oam);
    out += "," + path_name(m.path) + ">";
    return out;
  }

  friend bool operator==(const ModeSpace&, const ModeSpace&) = default;

 private:
  int lmax_;
  std::vector<std::string> paths_;
};

using SpacePtr = std::shared_ptr<const ModeSpace>;

inline SpacePtr make_space(int lmax, std::vector<std::string> paths) {
  return std::make_shared<const ModeSpace>(lmax, std::move(paths));
}

/// Photon A mode and photon B mode.
struct ModePair {
  BasisMode a;
  BasisMode b;
  friend bool operator==(const ModePair&, const ModePair&) = default;
  friend auto operator<=>(const ModePair&, const ModePair&) = default;
};

/// Immutable sparse amplitude map over a mode space. `Key` is BasisMode for
/// one photon or ModePair for a distinguishable pair.
template <typename Key>
class SparseState {
 public:
  using key_type = Key;
  using Map = std::map<Key, cplx>;

  SparseState(SpacePtr space, Map amplitudes) : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (!space_) throw Error(ErrorKind::InvalidArgument, "state without mode space");
    std::erase_if(amps_, [](const auto& kv) { return std::abs(kv.second) <= kDropThreshold; });
  }

  const ModeSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const Map& amplitudes() const noexcept { return amps_; }
  std::size_t size() const noexcept { return amps_.size(); }
  bool empty() const noexcept { return amps_.empty(); }

  cplx amplitude(const Key& key) const {
    auto it = amps_.find(key);
    return it == amps_.end() ? cplx{} : it->second;
  }

  double norm_squared() const {
    double sum = 0.0;
    for (const auto& [k, a] : amps_) sum += std::norm(a);
    return sum;
  }

  SparseState scaled(cplx factor) const {
    Map out;
    for (const auto& [k, a] : amps_) out.emplace(k, a * factor);
    return SparseState(space_, std::move(out));
  }

  SparseState normalized() const {
    const double n2 = norm_squared();
    if (n2 <= kDropThreshold * kDropThreshold)
      throw Error(ErrorKind::ZeroNorm, "state has zero norm");
    return scaled(1.0 / std::sqrt(n2));
  }

 private:
  SpacePtr space_;
  Map amps_;
};

using PhotonState = SparseState<BasisMode>;
using TwoPhotonState = SparseState<ModePair>;

inline BasisMode make_mode(const ModeSpace& space, Polarization pol, int oam, std::string_view path) {
  const PathId id = space.path_id(path);
  space.check_oam(oam);
  return BasisMode{pol, oam, id};
}

/// Single unit-amplitude entry |pol, oam>|path>.
inline PhotonState basis_state(const SpacePtr& space, Polarization pol, int oam, std::string_view path) {
  return PhotonState(space, {{make_mode(*space, pol, oam, path), cplx{1.0, 0.0}}});
}

/// |L> = (|H> + i|V>)/sqrt2.
inline PhotonState left_circular(const SpacePtr& space, int oam, std::string_view path) {
  const BasisMode h = make_mode(*space, Polarization::H, oam, path);
  BasisMode v = h;
  v.pol = Polarization::V;
  return PhotonState(space, {{h, cplx{kInvSqrt2, 0.0}}, {v, cplx{0.0, kInvSqrt2}}});
}

/// |R> = (|H> - i|V>)/sqrt2.
inline PhotonState right_circular(const SpacePtr& space, int oam, std::string_view path) {
  const BasisMode h = make_mode(*space, Polarization::H, oam, path);
  BasisMode v = h;
  v.pol = Polarization::V;
  return PhotonState(space, {{h, cplx{kInvSqrt2, 0.0}}, {v, cplx{0.0, -kInvSqrt2}}});
}

namespace detail {

template <typename Key>
void require_same_space(const SparseState<Key>& x, const SparseState<Key>& y) {
  if (x.space_ptr() != y.space_ptr() && !(x.space() == y.space()))
    throw Error(ErrorKind::DimensionMismatch, "states live in different mode spaces");
}

}  // namespace detail

/// Normalized linear combination. Throws ZeroNorm if the terms cancel.
template <typename Key>
SparseState<Key> superpose(std::span<const std::pair<cplx, SparseState<Key>>> terms) {
  if (terms.empty()) throw Error(ErrorKind::ZeroNorm, "empty superposition");
  const auto& space = terms.front().second.space_ptr();
  typename SparseState<Key>::Map acc;
  for (const auto& [c, s] : terms) {
    detail::require_same_space(terms.front().second, s);
    for (const auto& [k, a] : s.amplitudes()) acc[k] += c * a;
  }
  return SparseState<Key>(space, std::move(acc)).normalized();
}

template <typename Key>
SparseState<Key> superpose(std::initializer_list<std::pair<cplx, SparseState<Key>>> terms) {
  return superpose<Key>(std::span<const std::pair<cplx, SparseState<Key>>>(terms.begin(), terms.size()));
}

/// <x|y>.
template <typename Key>
cplx inner(const SparseState<Key>& x, const SparseState<Key>& y) {
  detail::require_same_space(x, y);
  cplx sum{};
  const auto& small = x.size() <= y.size() ? x : y;
  const auto& large = x.size() <= y.size() ? y : x;
  for (const auto& [k, a] : small.amplitudes()) {
    auto it = large.amplitudes().find(k);
    if (it == large.amplitudes().end()) continue;
    sum += (&small == &x) ? std::conj(a) * it->second : std::conj(it->second) * a;
  }
  return sum;
}

/// |<x|y>|^2 for unit states; symmetric and global-phase invariant.
template <typename Key>
double fidelity(const SparseState<Key>& x, const SparseState<Key>& y) {
  return std::norm(inner(x, y));
}

template <typename Key>
bool equal_up_to_global_phase(const SparseState<Key>& x, const SparseState<Key>& y, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  return fidelity(x, y) >= 1.0 - tol;
}

/// Exact-phase comparison: max |x_k - y_k| <= tol.
template <typename Key>
bool equal_exact(const SparseState<Key>& x, const SparseState<Key>& y, double tol) {
  detail::require_same_space(x, y);
  typename SparseState<Key>::Map diff = x.amplitudes();
  for (const auto& [k, a] : y.amplitudes()) diff[k] -= a;
  return std::all_of(diff.begin(), diff.end(), [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

/// Product state of two distinguishable photons.
inline TwoPhotonState tensor(const PhotonState& a, const PhotonState& b) {
  detail::require_same_space(a, b);
  for (const auto* s : {&a, &b}) {
    if (std::abs(s->norm_squared() - 1.0) > 1e-12)
      throw Error(ErrorKind::NotNormalized, "tensor factors must be unit norm");
  }
  TwoPhotonState::Map out;
  for (const auto& [ma, xa] : a.amplitudes()) {
    for (const auto& [mb, xb] : b.amplitudes()) out.emplace(ModePair{ma, mb}, xa * xb);
  }
  return TwoPhotonState(a.space_ptr(), std::move(out));
}

/// Born probabilities of one photon's modes, tracing out the other.
inline std::map<BasisMode, double> marginal(const TwoPhotonState& s, Photon which) {
  std::map<BasisMode, double> out;
  for (const auto& [k, a] : s.amplitudes()) out[which == Photon::A ? k.a : k.b] += std::norm(a);
  return out;
}

inline std::string format_amplitude(cplx a) {
  std::ostringstream os;
  os.precision(12);
  os << std::fixed << "(" << (a.real() == 0.0 ? 0.0 : a.real()) << (a.imag() < 0 ? " - " : " + ")
     << std::abs(a.imag()) << "i)";
  return os.str();
}

inline std::string to_string(const PhotonState& s) {
  std::string out;
  for (const auto& [m, a] : s.amplitudes()) out += format_amplitude(a) + " " + s.space().describe(m) + "\n";
  return out;
}

inline std::string to_string(const TwoPhotonState& s) {
  std::string out;
  for (const auto& [k, a] : s.amplitudes()) {
    out += format_amplitude(a) + " " + s.space().describe(k.a) + "_A " + s.space().describe(k.b) + "_B\n";
  }
  return out;
}

}  // namespace hbsa
