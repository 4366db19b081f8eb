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

// Test-only oracles: hand-written 2x2 Jones algebra, random states and
// fixture access. Nothing here calls the library's element actions.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hbsa/hbsa.hpp"

namespace hbsa::testing {

using Jones = std::array<std::array<cplx, 2>, 2>;

inline constexpr cplx kI{0.0, 1.0};
inline const double kR = 1.0 / std::sqrt(2.0);

inline Jones jones_qwp() { return {{{kR, kI * kR}, {kI * kR, kR}}}; }

inline Jones jones_hwp(double theta) {
  const double c = std::cos(2 * theta), s = std::sin(2 * theta);
  return {{{c, s}, {s, -c}}};
}

inline Jones multiply(const Jones& x, const Jones& y) {
  Jones out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out[i][j] += x[i][k] * y[k][j];
  return out;
}

/// (h, v) amplitudes of a polarization vector.
using PolVec = std::array<cplx, 2>;

inline PolVec times(const Jones& m, const PolVec& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline const PolVec kH{1.0, 0.0};
inline const PolVec kV{0.0, 1.0};
inline const PolVec kL{kR, kI * kR};
inline const PolVec kRc{kR, -kI * kR};

/// The state v at one (oam, path).
inline PhotonState pol_state(const SpacePtr& space, const PolVec& v, int oam, const std::string& path) {
  PhotonState::Map m;
  m[make_mode(*space, Polarization::H, oam, path)] = v[0];
  m[make_mode(*space, Polarization::V, oam, path)] = v[1];
  return PhotonState(space, std::move(m));
}

/// Largest |x_k - y_k| over the union of supports.
template <typename Key>
double max_deviation(const SparseState<Key>& x, const SparseState<Key>& y) {
  typename SparseState<Key>::Map d = x.amplitudes();
  for (const auto& [k, a] : y.amplitudes()) d[k] -= a;
  double worst = 0.0;
  for (const auto& [k, a] : d) worst = std::max(worst, std::abs(a));
  return worst;
}

/// Random unit state over every mode with |l| <= oam_bound on the given paths.
inline PhotonState random_state(const SpacePtr& space, std::mt19937_64& rng, int oam_bound,
                                const std::vector<std::string>& paths) {
  std::normal_distribution<double> g;
  PhotonState::Map m;
  for (const auto& p : paths)
    for (Polarization pol : {Polarization::H, Polarization::V})
      for (int l = -oam_bound; l <= oam_bound; ++l) m[make_mode(*space, pol, l, p)] = cplx(g(rng), g(rng));
  return PhotonState(space, std::move(m)).normalized();
}

/// Random unit state restricted to l = +1 and -1.
inline PhotonState random_pm1_state(const SpacePtr& space, std::mt19937_64& rng,
                                    const std::vector<std::string>& paths) {
  std::normal_distribution<double> g;
  PhotonState::Map m;
  for (const auto& p : paths)
    for (Polarization pol : {Polarization::H, Polarization::V})
      for (int l : {+1, -1}) m[make_mode(*space, pol, l, p)] = cplx(g(rng), g(rng));
  return PhotonState(space, std::move(m)).normalized();
}

/// Random unit pair state with each photon on l = +-1 at its origins.
inline TwoPhotonState random_measurable_pair(const SpacePtr& space, std::mt19937_64& rng,
                                             const std::vector<std::string>& origins_a,
                                             const std::vector<std::string>& origins_b) {
  std::normal_distribution<double> g;
  TwoPhotonState::Map m;
  for (const auto& pa : origins_a)
    for (const auto& pb : origins_b)
      for (Polarization qa : {Polarization::H, Polarization::V})
        for (Polarization qb : {Polarization::H, Polarization::V})
          for (int la : {+1, -1})
            for (int lb : {+1, -1})
              m[{make_mode(*space, qa, la, pa), make_mode(*space, qb, lb, pb)}] = cplx(g(rng), g(rng));
  return TwoPhotonState(space, std::move(m)).normalized();
}

inline std::string fixture_path(const std::string& name) { return std::string(HBSA_FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A malformed circuit document and the diagnostic it must produce.
struct BadFixture {
  const char* file;
  ErrorKind kind;
  int line;
  int column;
};

inline const std::vector<BadFixture>& bad_fixtures() {
  static const std::vector<BadFixture> all{
      {"bad_unknown_directive.circ", ErrorKind::SyntaxError, 4, 1},
      {"bad_unknown_key.circ", ErrorKind::SemanticError, 4, 39},
      {"bad_missing_equals.circ", ErrorKind::SyntaxError, 4, 20},
      {"bad_unknown_path.circ", ErrorKind::UnknownPath, 4, 19},
      {"bad_lmax.circ", ErrorKind::SyntaxError, 1, 6},
      {"bad_angle.circ", ErrorKind::SyntaxError, 4, 28},
      {"bad_q.circ", ErrorKind::NonPhysicalQ, 4, 27},
      {"bad_photon_label.circ", ErrorKind::SyntaxError, 4, 18},
      {"bad_undeclared_photon.circ", ErrorKind::SemanticError, 4, 11},
      {"bad_duplicate_key.circ", ErrorKind::SemanticError, 4, 28},
      {"bad_missing_required.circ", ErrorKind::SemanticError, 5, 7},
      {"bad_utf8.circ", ErrorKind::SyntaxError, 4, 9},
      {"bad_stage_kind.circ", ErrorKind::SyntaxError, 4, 7},
      {"bad_no_paths.circ", ErrorKind::SemanticError, 3, 1},
      {"bad_pair.circ", ErrorKind::SemanticError, 4, 7},
      {"bad_late_declaration.circ", ErrorKind::SemanticError, 5, 1},
      {"bad_empty_path_entry.circ", ErrorKind::SyntaxError, 4, 20},
  };
  return all;
}

/// The "line:col: " prefix a positioned diagnostic starts with.
inline std::string position_prefix(int line, int column) {
  return std::to_string(line) + ":" + std::to_string(column) + ": ";
}

}  // namespace hbsa::testing

namespace hbsa {

// Readable parameter values in test listings.
inline void PrintTo(Impl i, std::ostream* os) { *os << to_string(i); }

}  // namespace hbsa
