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

#include <gtest/gtest.h>

#include "support.hpp"

namespace hbsa {
namespace {

constexpr auto H = Polarization::H;
constexpr auto V = Polarization::V;

// Column m of the dense matrix must equal the sparse image of basis mode m.
double column_mismatch(const Element& e, const SpacePtr& space, int shift_room) {
  const dense::Matrix m = dense::element_matrix(e, *space);
  double worst = 0.0;
  for (std::size_t i = 0; i < space->photon_dimension(); ++i) {
    const BasisMode mode = space->mode_at(i);
    if (std::abs(mode.oam) > space->lmax() - shift_room) continue;
    PhotonState image(space, {});
    try {
      image = hbsa::apply(e, PhotonState(space, {{mode, 1.0}}));
    } catch (const Error&) {
      continue;  // sorter outside l = +-1
    }
    for (std::size_t r = 0; r < space->photon_dimension(); ++r) {
      const cplx want = image.amplitude(space->mode_at(r));
      worst = std::max(worst, std::abs(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) - want));
    }
  }
  return worst;
}

TEST(ElementMatrix, ColumnsMatchSparseAction) {
  const auto space = make_space(3, {"x", "y", "z"});
  const std::vector<std::string> site{"x", "z"};
  const std::vector<Element> elements{
      Element::qwp(Photon::A, site),
      Element::hwp(Photon::A, site, 0.37),
      Element::qplate(Photon::A, site, 0.5),
      Element::qplate(Photon::A, {"y"}, -1.0),
      Element::spp(Photon::A, site, 1),
      Element::dove(Photon::A, site, -kPi / 4),
      Element::phase_plate(Photon::A, site, 1.1),
      Element::phase_plate(Photon::A, {"y"}, kPi, V, -1),
      Element::mirror(Photon::A, site),
      Element::beam_splitter(Photon::A, "x", "y"),
      Element::pbs(Photon::A, "z", "x"),
      Element::oam_sorter(Photon::A, "y", "z"),
  };
  for (const auto& e : elements) EXPECT_LE(column_mismatch(e, space, 2), 1e-14) << describe(e);
}

TEST(ElementMatrix, UnitaryAwayFromTheTruncationEdge) {
  const auto space = make_space(3, {"x", "y"});
  for (const auto& e : {Element::qwp(Photon::A, {"x"}), Element::hwp(Photon::A, {"x", "y"}, 0.2),
                        Element::dove(Photon::A, {"y"}, 0.8), Element::beam_splitter(Photon::A, "x", "y"),
                        Element::pbs(Photon::A, "x", "y"), Element::mirror(Photon::A, {"x"})}) {
    const dense::Matrix m = dense::element_matrix(e, *space);
    const auto n = m.rows();
    EXPECT_LE((m.adjoint() * m - dense::identity(n)).cwiseAbs().maxCoeff(), 1e-14) << describe(e);
  }
}

TEST(GateMatrix, MatchesCanonicalAppliers) {
  const auto space = make_space(3, {"a", "b", "aux"});
  for (const GateOp& g : {GateOp{GateKind::PCos, Photon::A, {"a"}, 1}, GateOp{GateKind::OCps, Photon::A, {"a", "b"}},
                          GateOp{GateKind::OamHadamard, Photon::A, {"a", "b"}},
                          GateOp{GateKind::OamFlip, Photon::A, {"a"}}}) {
    const dense::Matrix m = dense::gate_matrix(g, *space);
    for (const BasisMode& mode : pm1_domain(*space, g.paths)) {
      const PhotonState image = hbsa::apply(Operation(g), PhotonState(space, {{mode, 1.0}}));
      const auto col = static_cast<Eigen::Index>(space->index(mode));
      for (std::size_t r = 0; r < space->photon_dimension(); ++r)
        EXPECT_LE(std::abs(m(static_cast<Eigen::Index>(r), col) - image.amplitude(space->mode_at(r))), 1e-14);
    }
  }
}

TEST(Assembly, EmptyCircuitGivesIdentityFactors) {
  const Circuit c = parse_circuit("lmax 2\npaths x y\nphoton A\nphoton B\nstage dl photon=A paths=x,y\n");
  const AssembledUnitary u = assemble_unitary(c);
  const auto n = static_cast<Eigen::Index>(u.photon_dimension());
  EXPECT_EQ(n, 2 * 5 * 2);
  EXPECT_LE((u.a - dense::identity(n)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((u.b - dense::identity(n)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(u.stages.size(), 1u);
}

TEST(Assembly, FullMatrixAgreesWithFactors) {
  const auto c = compile(parse_circuit(
      "lmax 1\npaths x y\nphoton A\nphoton B\nstage qwp photon=A paths=x\nstage bs photon=B paths=x,y\n"));
  const AssembledUnitary u = assemble_unitary(c);
  const dense::Matrix full = u.full();
  const auto d = u.photon_dimension();
  EXPECT_EQ(static_cast<std::size_t>(full.rows()), u.dimension());
  for (std::size_t r = 0; r < u.dimension(); r += 7)
    for (std::size_t col = 0; col < u.dimension(); col += 5)
      EXPECT_EQ(full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)), u.element(r, col));
  // Vectorised pair state: index_a * D + index_b.
  std::mt19937_64 rng(1);
  const TwoPhotonState in = testing::random_measurable_pair(c.space, rng, {"x", "y"}, {"x", "y"});
  const dense::Matrix psi = to_dense(in);
  Eigen::VectorXcd vec(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      vec(static_cast<Eigen::Index>(i * d + j)) = psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  const Eigen::VectorXcd out = full * vec;
  const dense::Matrix by_factors = u.apply(psi);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      EXPECT_LE(std::abs(out(static_cast<Eigen::Index>(i * d + j)) -
                         by_factors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))),
                1e-14);
}

TEST(Assembly, DimensionCapIsEnforced) {
  const CompiledCircuit c = compile(fig2_circuit());
  const std::size_t d = c.space->photon_dimension();
  EXPECT_NO_THROW(assemble_unitary(c, d * d));
  try {
    assemble_unitary(c, d * d - 1);
    ADD_FAILURE() << "expected DimensionCap";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionCap);
  }
}

TEST(Conversion, DenseRoundTrip) {
  const auto space = make_space(2, {"a1", "b1", "a2", "b2"});
  std::mt19937_64 rng(4);
  const TwoPhotonState in = testing::random_measurable_pair(space, rng, {"a1", "b1"}, {"a2", "b2"});
  EXPECT_LE(testing::max_deviation(from_dense(space, to_dense(in)), in), 0.0);
}

TEST(Domain, Fig2InputsPerPhoton) {
  for (Impl impl : {Impl::Canonical, Impl::Decomposed}) {
    const CompiledCircuit c = compile(with_impl(fig2_circuit(), impl));
    const auto da = input_domain(c, Photon::A);
    const auto db = input_domain(c, Photon::B);
    EXPECT_EQ(da.size(), 8u);
    EXPECT_EQ(db.size(), 8u);
    for (const BasisMode& m : da) {
      const std::string& p = c.space->path_name(m.path);
      EXPECT_TRUE(p == "a1" || p == "b1") << p;
    }
    // Every zero-charge input of the analyzer is in the domain.
    for (const char* p : {"a1", "b1"})
      for (Polarization pol : {H, V})
        EXPECT_NE(std::find(da.begin(), da.end(), make_mode(*c.space, pol, 0, p)), da.end()) << p;
  }
}

class Fig2Oracle : public ::testing::TestWithParam<Impl> {};

TEST_P(Fig2Oracle, BasisInputsAgree) {
  const CompiledCircuit c = compile(with_impl(fig2_circuit(), GetParam()));
  const AssembledUnitary u = assemble_unitary(c);
  const auto inputs =
      domain_basis_states(c.space, input_domain(c, Photon::A), input_domain(c, Photon::B));
  EXPECT_EQ(inputs.size(), 64u);
  const OracleComparison r = compare_paths(c, u, inputs);
  EXPECT_LE(r.max_amplitude_deviation, 1e-10);
  EXPECT_LE(r.max_total_variation, 1e-10);
}

TEST_P(Fig2Oracle, RandomInputsAgree) {
  const CompiledCircuit c = compile(with_impl(fig2_circuit(), GetParam()));
  const AssembledUnitary u = assemble_unitary(c);
  const auto inputs = random_domain_states(c.space, input_domain(c, Photon::A), input_domain(c, Photon::B), 50);
  ASSERT_EQ(inputs.size(), 50u);
  for (const auto& s : inputs) ASSERT_NEAR(s.norm_squared(), 1.0, 1e-12);
  const OracleComparison r = compare_paths(c, u, inputs);
  EXPECT_EQ(r.inputs, 50u);
  EXPECT_LE(r.max_amplitude_deviation, 1e-10);
  EXPECT_LE(r.max_total_variation, 1e-10);
}

TEST_P(Fig2Oracle, StageFactorsAreUnitaryOnTheDomain) {
  const CompiledCircuit c = compile(with_impl(fig2_circuit(), GetParam()));
  const AssembledUnitary u = assemble_unitary(c);
  const auto residuals = unitarity_residuals(c, u);
  EXPECT_EQ(residuals.size(), c.source.stages.size());
  for (double r : residuals) EXPECT_LE(r, 1e-10);
}

TEST_P(Fig2Oracle, ZeroChargeInputIsRejectedByBothPaths) {
  // Without the P-COS stages an l = 0 input reaches the OAM-controlled gates.
  Circuit trimmed = fig2_circuit();
  trimmed.stages.erase(trimmed.stages.begin(), trimmed.stages.begin() + 2);
  const CompiledCircuit c = compile(with_impl(trimmed, GetParam()));
  const auto& s = *c.space;
  const TwoPhotonState in(c.space, {{ModePair{make_mode(s, H, 0, "a1"), make_mode(s, H, 0, "a2")}, 1.0}});
  ErrorKind sparse_kind = ErrorKind::InvalidArgument, dense_kind = ErrorKind::InvalidArgument;
  try {
    measure(c, propagate(c, in));
  } catch (const Error& e) {
    sparse_kind = e.kind();
  }
  try {
    dense_analyze(c, assemble_unitary(c), in);
  } catch (const Error& e) {
    dense_kind = e.kind();
  }
  EXPECT_EQ(sparse_kind, ErrorKind::UnsortableOam);
  EXPECT_EQ(dense_kind, ErrorKind::UnsortableOam);
}

INSTANTIATE_TEST_SUITE_P(BothImplementations, Fig2Oracle, ::testing::Values(Impl::Canonical, Impl::Decomposed),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
}  // namespace hbsa
