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

// Dense matrix oracle. Every operation is rebuilt here as an explicit
// matrix on path (x) OAM (x) polarization by Kronecker products, without
// reusing the sparse mode actions. The two photons act on separate
// factors, so the pair unitary is U_A (x) U_B and is stored factored;
// on a D x D amplitude matrix Psi it acts as U_A Psi U_B^T.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <vector>

#include "hbsa/circuit.hpp"

namespace hbsa {

namespace dense {

using Matrix = Eigen::MatrixXcd;

/// Default ceiling on the two-photon dimension D^2.
inline constexpr std::size_t kDefaultDimensionCap = 1'000'000;

inline Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

/// Factor shapes of one photon's space.
struct Shape {
  Eigen::Index paths;
  Eigen::Index levels;  // 2 lmax + 1
  int lmax;

  explicit Shape(const ModeSpace& s)
      : paths(static_cast<Eigen::Index>(s.path_count())),
        levels(static_cast<Eigen::Index>(s.oam_levels())),
        lmax(s.lmax()) {}

  Eigen::Index oam_row(int l) const { return static_cast<Eigen::Index>(l + lmax); }
  bool has(int l) const { return l >= -lmax && l <= lmax; }
  Eigen::Index dim() const { return paths * levels * 2; }
};

inline Matrix site_projector(const ModeSpace& space, const std::vector<std::string>& site) {
  const Shape sh(space);
  Matrix p = Matrix::Zero(sh.paths, sh.paths);
  for (const auto& name : site) {
    const auto id = static_cast<Eigen::Index>(space.path_id(name));
    p(id, id) = 1.0;
  }
  return p;
}

/// Identity with rows x and y exchanged.
inline Matrix path_swap(const ModeSpace& space, const std::string& x, const std::string& y) {
  const Shape sh(space);
  Matrix s = identity(sh.paths);
  const auto i = static_cast<Eigen::Index>(space.path_id(x));
  const auto j = static_cast<Eigen::Index>(space.path_id(y));
  s(i, i) = s(j, j) = 0.0;
  s(i, j) = s(j, i) = 1.0;
  return s;
}

/// |l + k><l|, truncated.
inline Matrix oam_shift(const Shape& sh, int k) {
  Matrix m = Matrix::Zero(sh.levels, sh.levels);
  for (int l = -sh.lmax; l <= sh.lmax; ++l)
    if (sh.has(l + k)) m(sh.oam_row(l + k), sh.oam_row(l)) = 1.0;
  return m;
}

/// |-l><l|.
inline Matrix oam_flip(const Shape& sh) {
  Matrix m = Matrix::Zero(sh.levels, sh.levels);
  for (int l = -sh.lmax; l <= sh.lmax; ++l) m(sh.oam_row(-l), sh.oam_row(l)) = 1.0;
  return m;
}

inline Matrix oam_projector(const Shape& sh, int l) {
  Matrix m = Matrix::Zero(sh.levels, sh.levels);
  if (sh.has(l)) m(sh.oam_row(l), sh.oam_row(l)) = 1.0;
  return m;
}

inline Matrix pol_projector(Polarization p) {
  Matrix m = Matrix::Zero(2, 2);
  m(static_cast<int>(p), static_cast<int>(p)) = 1.0;
  return m;
}

/// Column vectors of the circular states in the (H, V) basis.
inline Eigen::Vector2cd left_circular() { return Eigen::Vector2cd(kInvSqrt2, cplx(0, kInvSqrt2)); }
inline Eigen::Vector2cd right_circular() { return Eigen::Vector2cd(kInvSqrt2, cplx(0, -kInvSqrt2)); }

/// `local` on the site's paths, identity elsewhere.
inline Matrix on_site(const ModeSpace& space, const std::vector<std::string>& site, const Matrix& local) {
  const Shape sh(space);
  const Matrix p = site_projector(space, site);
  return kron(p, local) + kron(identity(sh.paths) - p, identity(sh.levels * 2));
}

/// Matrix of one element on a single photon's space.
inline Matrix element_matrix(const Element& e, const ModeSpace& space) {
  const Shape sh(space);
  const Matrix i_oam = identity(sh.levels);
  const cplx i{0, 1};
  switch (e.kind) {
    case ElementKind::Qwp: {
      Matrix j(2, 2);
      j << 1.0, i, i, 1.0;
      return on_site(space, e.paths, kron(i_oam, j * kInvSqrt2));
    }
    case ElementKind::Hwp: {
      const double c = std::cos(2 * e.angle), s = std::sin(2 * e.angle);
      Matrix j(2, 2);
      j << c, s, s, -c;
      return on_site(space, e.paths, kron(i_oam, j));
    }
    case ElementKind::QPlate: {
      const Matrix l_to_r = right_circular() * left_circular().adjoint();
      const Matrix r_to_l = left_circular() * right_circular().adjoint();
      return on_site(space, e.paths,
                     kron(oam_shift(sh, e.twice_q), l_to_r) + kron(oam_shift(sh, -e.twice_q), r_to_l));
    }
    case ElementKind::Spp:
      return on_site(space, e.paths, kron(oam_shift(sh, e.shift), identity(2)));
    case ElementKind::DovePrism: {
      Matrix phases = Matrix::Zero(sh.levels, sh.levels);
      for (int l = -sh.lmax; l <= sh.lmax; ++l)
        phases(sh.oam_row(l), sh.oam_row(l)) = i * std::polar(1.0, 2 * e.angle * l);
      return on_site(space, e.paths, kron(oam_flip(sh) * phases, identity(2)));
    }
    case ElementKind::PhasePlate: {
      const Matrix po = e.oam_filter ? oam_projector(sh, *e.oam_filter) : i_oam;
      const Matrix pp = e.pol_filter ? pol_projector(*e.pol_filter) : identity(2);
      const Matrix hit = kron(site_projector(space, e.paths), kron(po, pp));
      return identity(sh.dim()) + (std::polar(1.0, e.phase) - 1.0) * hit;
    }
    case ElementKind::Mirror:
      return on_site(space, e.paths, kron(i * oam_flip(sh), identity(2)));
    case ElementKind::BeamSplitter: {
      Matrix b = identity(sh.paths);
      const auto x = static_cast<Eigen::Index>(space.path_id(e.paths.at(0)));
      const auto y = static_cast<Eigen::Index>(space.path_id(e.paths.at(1)));
      b(x, x) = b(y, y) = kInvSqrt2;
      b(x, y) = b(y, x) = i * kInvSqrt2;
      return kron(b, identity(sh.levels * 2));
    }
    case ElementKind::Pbs:
      return kron(path_swap(space, e.paths.at(0), e.paths.at(1)), kron(i_oam, pol_projector(Polarization::V))) +
             kron(identity(sh.paths), kron(i_oam, pol_projector(Polarization::H)));
    case ElementKind::OamSorter: {
      const Matrix minus = oam_projector(sh, -1);
      return kron(path_swap(space, e.paths.at(0), e.paths.at(1)), kron(minus, identity(2))) +
             kron(identity(sh.paths), kron(i_oam - minus, identity(2)));
    }
  }
  return identity(sh.dim());
}

/// Matrix of a canonical gate. Outside the gate's domain (l != +-1 for
/// O-CPS and OH) the matrix acts as identity; callers restrict inputs.
inline Matrix gate_matrix(const GateOp& g, const ModeSpace& space) {
  const Shape sh(space);
  switch (g.kind) {
    case GateKind::PCos:
      return on_site(space, g.paths,
                     kron(oam_shift(sh, g.twice_q), pol_projector(Polarization::H)) +
                         kron(oam_shift(sh, -g.twice_q), pol_projector(Polarization::V)));
    case GateKind::OCps:
      return element_matrix(Element::oam_sorter(g.photon, g.paths.at(0), g.paths.at(1)), space);
    case GateKind::OamHadamard: {
      Matrix o = identity(sh.levels);
      const auto up = sh.oam_row(1), down = sh.oam_row(-1);
      o(up, up) = o(up, down) = o(down, up) = kInvSqrt2;
      o(down, down) = -kInvSqrt2;
      return on_site(space, g.paths, kron(o, identity(2)));
    }
    case GateKind::OamFlip:
      return on_site(space, g.paths, kron(oam_flip(sh), identity(2)));
  }
  return identity(sh.dim());
}

inline Matrix operation_matrix(const Operation& op, const ModeSpace& space) {
  return std::visit(
      [&](const auto& x) -> Matrix {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Element>)
          return element_matrix(x, space);
        else
          return gate_matrix(x, space);
      },
      op);
}

}  // namespace dense

/// One stage's factors; the photon it does not touch gets identity.
struct StageFactor {
  int stage = 0;
  dense::Matrix a;
  dense::Matrix b;
};

/// U = U_A (x) U_B for a whole circuit, kept as its two factors.
struct AssembledUnitary {
  SpacePtr space;
  dense::Matrix a;
  dense::Matrix b;
  std::vector<StageFactor> stages;

  std::size_t photon_dimension() const { return space->photon_dimension(); }
  std::size_t dimension() const { return photon_dimension() * photon_dimension(); }

  /// Entry of the full pair matrix; row/column index = iA * D + iB.
  cplx element(std::size_t row, std::size_t col) const {
    const auto d = photon_dimension();
    return a(static_cast<Eigen::Index>(row / d), static_cast<Eigen::Index>(col / d)) *
           b(static_cast<Eigen::Index>(row % d), static_cast<Eigen::Index>(col % d));
  }

  /// The explicit D^2 x D^2 matrix. Only sensible for small spaces.
  dense::Matrix full() const { return dense::kron(a, b); }

  /// Psi' = U_A Psi U_B^T.
  dense::Matrix apply(const dense::Matrix& psi) const { return a * psi * b.transpose(); }
};

/// Multiplies per-stage matrices into the pair unitary. Throws
/// DimensionCap when D^2 exceeds `cap`.
inline AssembledUnitary assemble_unitary(const CompiledCircuit& c,
                                         std::size_t cap = dense::kDefaultDimensionCap) {
  const ModeSpace& space = *c.space;
  const std::size_t d = space.photon_dimension();
  if (d * d > cap)
    throw Error(ErrorKind::DimensionCap, "pair dimension " + std::to_string(d * d) + " exceeds cap " +
                                             std::to_string(cap));
  const auto n = static_cast<Eigen::Index>(d);
  AssembledUnitary u{c.space, dense::identity(n), dense::identity(n), {}};
  for (std::size_t s = 0; s < c.source.stages.size(); ++s) {
    StageFactor f{static_cast<int>(s), dense::identity(n), dense::identity(n)};
    for (const auto& step : c.steps) {
      if (step.stage != static_cast<int>(s)) continue;
      dense::Matrix& target = photon_of(step.op) == Photon::A ? f.a : f.b;
      target = dense::operation_matrix(step.op, space) * target;
    }
    u.a = f.a * u.a;
    u.b = f.b * u.b;
    u.stages.push_back(std::move(f));
  }
  return u;
}

inline AssembledUnitary assemble_unitary(const Circuit& c, std::size_t cap = dense::kDefaultDimensionCap) {
  return assemble_unitary(compile(c), cap);
}

/// Amplitude matrix Psi(iA, iB) of a pair state.
inline dense::Matrix to_dense(const TwoPhotonState& s) {
  const auto n = static_cast<Eigen::Index>(s.space().photon_dimension());
  dense::Matrix psi = dense::Matrix::Zero(n, n);
  for (const auto& [pair, amp] : s.amplitudes())
    psi(static_cast<Eigen::Index>(s.space().index(pair.a)), static_cast<Eigen::Index>(s.space().index(pair.b))) =
        amp;
  return psi;
}

inline TwoPhotonState from_dense(const SpacePtr& space, const dense::Matrix& psi) {
  TwoPhotonState::Map amps;
  for (Eigen::Index i = 0; i < psi.rows(); ++i)
    for (Eigen::Index j = 0; j < psi.cols(); ++j)
      if (std::abs(psi(i, j)) > kDropThreshold)
        amps.emplace(ModePair{space->mode_at(static_cast<std::size_t>(i)), space->mode_at(static_cast<std::size_t>(j))},
                     psi(i, j));
  return TwoPhotonState(space, std::move(amps));
}

}  // namespace hbsa
