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

// Cross-checks between sparse propagation and the dense assembled
// unitary: restricted input domain, dense Born-rule measurement,
// fixed-seed random inputs and per-stage unitarity residuals.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hbsa/dense.hpp"
#include "hbsa/measurement.hpp"

namespace hbsa {

inline constexpr std::uint64_t kDefaultOracleSeed = 0xB5A;

/// Single-photon basis modes that propagate through every stage without
/// error and arrive measurable: all output amplitude on the photon's
/// origins with l = +-1. Pairs of these span the restricted domain.
inline std::vector<BasisMode> input_domain(const CompiledCircuit& c, Photon which) {
  const auto& space = *c.space;
  const auto origins = c.origins(which);
  std::vector<BasisMode> out;
  for (std::size_t i = 0; i < space.photon_dimension(); ++i) {
    const BasisMode m = space.mode_at(i);
    try {
      const PhotonState s = propagate_photon(c, which, PhotonState(c.space, {{m, 1.0}}));
      bool ok = std::abs(s.norm_squared() - 1.0) < 1e-9;
      for (const auto& [mode, amp] : s.amplitudes()) {
        if (std::abs(amp) <= kLeakThreshold) continue;
        const bool at_origin = detail::origin_index(origins, space.path_name(mode.path)) >= 0;
        ok = ok && at_origin && (mode.oam == 1 || mode.oam == -1);
      }
      if (ok) out.push_back(m);
    } catch (const Error&) {
      // Outside the domain.
    }
  }
  return out;
}

/// Born-rule coincidence distribution read directly from a dense amplitude
/// matrix. Raises the same errors as sppm_project.
inline OutcomeDistribution dense_distribution(const dense::Matrix& psi, const ModeSpace& space,
                                              const std::vector<std::string>& origins_a,
                                              const std::vector<std::string>& origins_b) {
  OutcomeDistribution dist(origins_a, origins_b);
  auto detector = [&](std::size_t index, const std::vector<std::string>& origins, Photon which) {
    const BasisMode m = space.mode_at(index);
    const std::string& path = space.path_name(m.path);
    if (std::find(origins.begin(), origins.end(), path) == origins.end())
      throw Error(ErrorKind::LeakedAmplitude,
                  "photon " + std::string(to_string(which)) + " amplitude at " + space.describe(m));
    if (m.oam != 1 && m.oam != -1) throw Error(ErrorKind::UnsortableOam, "cannot sort " + space.describe(m));
    return DetectorId{m.oam, m.pol, path};
  };
  for (Eigen::Index i = 0; i < psi.rows(); ++i) {
    for (Eigen::Index j = 0; j < psi.cols(); ++j) {
      if (std::abs(psi(i, j)) <= kLeakThreshold) continue;
      const auto a = detector(static_cast<std::size_t>(i), origins_a, Photon::A);
      const auto b = detector(static_cast<std::size_t>(j), origins_b, Photon::B);
      dist.add({a, b}, std::norm(psi(i, j)));
    }
  }
  return dist;
}

/// Dense counterpart of propagate + measure.
inline OutcomeDistribution dense_analyze(const CompiledCircuit& c, const AssembledUnitary& u,
                                         const TwoPhotonState& input) {
  return dense_distribution(u.apply(to_dense(input)), *c.space, c.origins(Photon::A), c.origins(Photon::B));
}

/// Unit vectors in the span of domain_a (x) domain_b with complex Gaussian
/// coefficients from a fixed-seed 64-bit Mersenne twister.
inline std::vector<TwoPhotonState> random_domain_states(const SpacePtr& space, const std::vector<BasisMode>& domain_a,
                                                        const std::vector<BasisMode>& domain_b, std::size_t count,
                                                        std::uint64_t seed = kDefaultOracleSeed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<TwoPhotonState> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    TwoPhotonState::Map amps;
    for (const auto& a : domain_a)
      for (const auto& b : domain_b) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        amps[{a, b}] = cplx(re, im);
      }
    out.push_back(TwoPhotonState(space, std::move(amps)).normalized());
  }
  return out;
}

struct OracleComparison {
  std::size_t inputs = 0;
  double max_amplitude_deviation = 0.0;  // max |U v - propagate(v)|
  double max_total_variation = 0.0;      // between measured distributions
};

/// Compares sparse and dense evolution of each input.
inline OracleComparison compare_paths(const CompiledCircuit& c, const AssembledUnitary& u,
                                      const std::vector<TwoPhotonState>& inputs) {
  OracleComparison r;
  for (const auto& in : inputs) {
    const TwoPhotonState sparse = propagate(c, in);
    const dense::Matrix psi = u.apply(to_dense(in));
    const dense::Matrix diff = psi - to_dense(sparse);
    r.max_amplitude_deviation = std::max(r.max_amplitude_deviation, diff.cwiseAbs().maxCoeff());
    const auto p = measure(c, sparse);
    const auto q = dense_distribution(psi, *c.space, c.origins(Photon::A), c.origins(Photon::B));
    r.max_total_variation = std::max(r.max_total_variation, total_variation(p, q));
    ++r.inputs;
  }
  return r;
}

/// Every product basis state of the restricted domain.
inline std::vector<TwoPhotonState> domain_basis_states(const SpacePtr& space, const std::vector<BasisMode>& domain_a,
                                                       const std::vector<BasisMode>& domain_b) {
  std::vector<TwoPhotonState> out;
  for (const auto& a : domain_a)
    for (const auto& b : domain_b) out.push_back(TwoPhotonState(space, {{ModePair{a, b}, 1.0}}));
  return out;
}

namespace detail {

inline dense::Matrix domain_columns(const ModeSpace& space, const std::vector<BasisMode>& domain) {
  const auto d = static_cast<Eigen::Index>(space.photon_dimension());
  dense::Matrix v = dense::Matrix::Zero(d, static_cast<Eigen::Index>(domain.size()));
  for (std::size_t k = 0; k < domain.size(); ++k) v(static_cast<Eigen::Index>(space.index(domain[k])), static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

/// max |G1(i,j) G2(k,l) - H1(i,j) H2(k,l)|: deviation of a product Gram
/// matrix from another.
inline double product_gram_deviation(const dense::Matrix& g1, const dense::Matrix& g2, const dense::Matrix& h1,
                                     const dense::Matrix& h2) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g1.rows(); ++i)
    for (Eigen::Index j = 0; j < g1.cols(); ++j)
      for (Eigen::Index k = 0; k < g2.rows(); ++k)
        for (Eigen::Index l = 0; l < g2.cols(); ++l)
          worst = std::max(worst, std::abs(g1(i, j) * g2(k, l) - h1(i, j) * h2(k, l)));
  return worst;
}

}  // namespace detail

/// For each stage, how far it is from an isometry on the subspace reached
/// from the restricted domain: max deviation of the Gram matrix of the
/// propagated domain basis before and after the stage.
inline std::vector<double> unitarity_residuals(const CompiledCircuit& c, const AssembledUnitary& u) {
  const auto& space = *c.space;
  dense::Matrix va = detail::domain_columns(space, input_domain(c, Photon::A));
  dense::Matrix vb = detail::domain_columns(space, input_domain(c, Photon::B));
  std::vector<double> out;
  for (const auto& f : u.stages) {
    const dense::Matrix wa = f.a * va;
    const dense::Matrix wb = f.b * vb;
    out.push_back(detail::product_gram_deviation(wa.adjoint() * wa, wb.adjoint() * wb, va.adjoint() * va,
                                                 vb.adjoint() * vb));
    va = wa;
    vb = wb;
  }
  return out;
}

}  // namespace hbsa
