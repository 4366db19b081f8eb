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

using testing::kI;
using testing::max_deviation;
constexpr auto H = Polarization::H;
constexpr auto V = Polarization::V;
constexpr double kTol = 1e-12;

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

PhotonState plus_minus(const SpacePtr& s, Polarization p, const std::string& path) {
  return superpose<BasisMode>({{1.0, basis_state(s, p, 1, path)}, {1.0, basis_state(s, p, -1, path)}});
}

// P-COS.

TEST(PCos, TruthTableExamples) {
  const auto s = make_space(4, {"x"});
  EXPECT_LE(max_deviation(p_cos_apply(basis_state(s, H, 0, "x"), 0.5, {"x"}), basis_state(s, H, 1, "x")), 0.0);
  EXPECT_LE(max_deviation(p_cos_apply(basis_state(s, V, 0, "x"), 0.5, {"x"}), basis_state(s, V, -1, "x")), 0.0);
  const PhotonState diag = superpose<BasisMode>({{1.0, basis_state(s, H, 0, "x")}, {1.0, basis_state(s, V, 0, "x")}});
  const PhotonState want = superpose<BasisMode>({{1.0, basis_state(s, H, 1, "x")}, {1.0, basis_state(s, V, -1, "x")}});
  EXPECT_LE(max_deviation(p_cos_apply(diag, 0.5, {"x"}), want), 1e-15);
}

TEST(PCos, ExhaustiveDomainMatchesShiftRule) {
  const auto s = make_space(4, {"x", "y"});
  for (int twice_q : {1, 2, -1, 3}) {
    for (const BasisMode& m : p_cos_domain(*s, {"x", "y"}, twice_q)) {
      const PhotonState out = p_cos_apply(PhotonState(s, {{m, 1.0}}), twice_q / 2.0, {"x", "y"});
      BasisMode want = m;
      want.oam += m.pol == H ? twice_q : -twice_q;
      EXPECT_EQ(out.amplitude(want), cplx(1.0, 0.0)) << s->describe(m);
      EXPECT_EQ(out.size(), 1u);
    }
  }
}

TEST(PCos, DecompositionExamples) {
  const auto s = make_space(4, {"x"});
  const auto seq = p_cos_decompose(Photon::A, {"x"}, 1);
  ASSERT_EQ(seq.size(), 4u);
  EXPECT_EQ(seq[0].kind, ElementKind::Qwp);
  EXPECT_EQ(seq[1].kind, ElementKind::QPlate);
  EXPECT_EQ(seq[2].kind, ElementKind::Qwp);
  EXPECT_EQ(seq[3].kind, ElementKind::PhasePlate);
  EXPECT_EQ(seq[3].tag, kCalibrationTag);
  EXPECT_LE(max_deviation(apply_all<PhotonState>(seq, basis_state(s, H, 0, "x")), basis_state(s, H, 1, "x")), 1e-15);
  EXPECT_LE(max_deviation(apply_all<PhotonState>(seq, basis_state(s, V, 0, "x")), basis_state(s, V, -1, "x")), 1e-15);
}

TEST(PCos, BareQwpQpQwpLeavesMinusOneOnV) {
  const auto s = make_space(4, {"x"});
  auto seq = p_cos_decompose(Photon::A, {"x"}, 1);
  seq.pop_back();
  EXPECT_LE(max_deviation(apply_all<PhotonState>(seq, basis_state(s, V, 0, "x")), basis_state(s, V, -1, "x").scaled(-1.0)),
            1e-15);
}

// O-CPS.

TEST(OCps, TruthTable) {
  const auto s = make_space(3, {"a", "b"});
  for (Polarization p : {H, V}) {
    EXPECT_LE(max_deviation(o_cps_apply(basis_state(s, p, 1, "a"), "a", "b"), basis_state(s, p, 1, "a")), 0.0);
    EXPECT_LE(max_deviation(o_cps_apply(basis_state(s, p, -1, "a"), "a", "b"), basis_state(s, p, -1, "b")), 0.0);
    EXPECT_LE(max_deviation(o_cps_apply(basis_state(s, p, 1, "b"), "a", "b"), basis_state(s, p, 1, "b")), 0.0);
    EXPECT_LE(max_deviation(o_cps_apply(basis_state(s, p, -1, "b"), "a", "b"), basis_state(s, p, -1, "a")), 0.0);
  }
}

TEST(OCps, SuperpositionsFromEachInputPath) {
  const auto s = make_space(3, {"a", "b"});
  for (Polarization p : {H, V}) {
    const PhotonState from_a = o_cps_apply(plus_minus(s, p, "a"), "a", "b");
    const PhotonState want_a =
        superpose<BasisMode>({{1.0, basis_state(s, p, 1, "a")}, {1.0, basis_state(s, p, -1, "b")}});
    EXPECT_LE(max_deviation(from_a, want_a), 1e-15);
    const PhotonState from_b = o_cps_apply(plus_minus(s, p, "b"), "a", "b");
    const PhotonState want_b =
        superpose<BasisMode>({{1.0, basis_state(s, p, 1, "b")}, {1.0, basis_state(s, p, -1, "a")}});
    EXPECT_LE(max_deviation(from_b, want_b), 1e-15);
  }
}

TEST(OCps, RoutingIsDeterministicAndAnInvolution) {
  const auto s = make_space(3, {"a", "b"});
  const auto seq = o_cps_decompose(Photon::A, "a", "b");
  for (const BasisMode& m : pm1_domain(*s, {"a", "b"})) {
    const PhotonState in(s, {{m, 1.0}});
    for (const PhotonState& out : {o_cps_apply(in, "a", "b"), apply_all<PhotonState>(seq, in)}) {
      ASSERT_EQ(out.size(), 1u);
      const BasisMode dest = out.amplitudes().begin()->first;
      EXPECT_NEAR(std::norm(out.amplitudes().begin()->second), 1.0, kTol);
      EXPECT_EQ(dest.path == m.path, m.oam == 1);
    }
    EXPECT_LE(max_deviation(o_cps_apply(o_cps_apply(in, "a", "b"), "a", "b"), in), 0.0);
  }
}

TEST(OCps, DomainAndPlacementErrors) {
  const auto s = make_space(3, {"a", "b"});
  EXPECT_EQ(kind_of([&] { o_cps_apply(basis_state(s, H, 0, "a"), "a", "b"); }), ErrorKind::UnsortableOam);
  EXPECT_EQ(kind_of([&] { o_cps_apply(basis_state(s, H, 2, "a"), "a", "b"); }), ErrorKind::UnsortableOam);
  EXPECT_EQ(kind_of([&] { o_cps_apply(basis_state(s, H, 1, "a"), "a", "a"); }), ErrorKind::SamePath);
}

TEST(OCps, CalibrationSolvesToQuarterTurnPlates) {
  const auto& cal = ocps_calibration();
  EXPECT_DOUBLE_EQ(cal.input_phase_y, -kPi / 2);
  EXPECT_DOUBLE_EQ(cal.output_phase_y, kPi / 2);
  EXPECT_NEAR(std::abs(cal.global_phase - cplx(-1.0, 0.0)), 0.0, kTol);
  const auto seq = o_cps_decompose(Photon::A, "a", "b");
  int plates = 0;
  for (const auto& e : seq) plates += e.tag == kCalibrationTag ? 1 : 0;
  EXPECT_EQ(plates, 2);
  EXPECT_EQ(seq.front().kind, ElementKind::Spp);
  EXPECT_EQ(seq.back().kind, ElementKind::Spp);
}

// Walkthrough of the interferometer on (|p,+1> + |p,-1>)/sqrt2.

TEST(OCpsWalkthrough, IntermediateStatesFromPathA) {
  for (Polarization p : {H, V}) {
    const OcpsTrace t = ocps_walkthrough(p, "a");
    const auto& s = t.input.space_ptr();
    EXPECT_LE(max_deviation(t.input, plus_minus(s, p, "a")), 1e-15);
    const PhotonState shifted =
        superpose<BasisMode>({{1.0, basis_state(s, p, 2, "a")}, {1.0, basis_state(s, p, 0, "a")}});
    EXPECT_NEAR(fidelity(t.after_spp, shifted), 1.0, kTol);
    // +2 stays on a, 0 moves to b, each with unit-modulus amplitude 1/sqrt2.
    ASSERT_EQ(t.after_second_bs.size(), 2u);
    EXPECT_NEAR(std::abs(t.after_second_bs.amplitude(make_mode(*s, p, 2, "a"))), testing::kR, kTol);
    EXPECT_NEAR(std::abs(t.after_second_bs.amplitude(make_mode(*s, p, 0, "b"))), testing::kR, kTol);
    const PhotonState routed =
        superpose<BasisMode>({{1.0, basis_state(s, p, 2, "a")}, {1.0, basis_state(s, p, 0, "b")}});
    EXPECT_NEAR(fidelity(t.after_second_bs, routed), 1.0, kTol);
    const PhotonState out = superpose<BasisMode>({{1.0, basis_state(s, p, 1, "a")}, {1.0, basis_state(s, p, -1, "b")}});
    EXPECT_NEAR(fidelity(t.output, out), 1.0, kTol);
  }
}

TEST(OCpsWalkthrough, OutputFromPathB) {
  for (Polarization p : {H, V}) {
    const OcpsTrace t = ocps_walkthrough(p, "b");
    const auto& s = t.input.space_ptr();
    const PhotonState out = superpose<BasisMode>({{1.0, basis_state(s, p, 1, "b")}, {1.0, basis_state(s, p, -1, "a")}});
    EXPECT_NEAR(fidelity(t.output, out), 1.0, kTol);
  }
}

// OH.

TEST(Oh, TruthTable) {
  const auto s = make_space(3, {"x"});
  for (Polarization p : {H, V}) {
    const PhotonState plus = superpose<BasisMode>({{1.0, basis_state(s, p, 1, "x")}, {1.0, basis_state(s, p, -1, "x")}});
    const PhotonState minus =
        superpose<BasisMode>({{1.0, basis_state(s, p, 1, "x")}, {-1.0, basis_state(s, p, -1, "x")}});
    EXPECT_LE(max_deviation(oh_apply(basis_state(s, p, 1, "x"), {"x"}), plus), 1e-15);
    EXPECT_LE(max_deviation(oh_apply(basis_state(s, p, -1, "x"), {"x"}), minus), 1e-15);
  }
}

TEST(Oh, IsAnInvolution) {
  const auto s = make_space(3, {"x", "y"});
  std::mt19937_64 rng(21);
  for (int n = 0; n < 100; ++n) {
    const PhotonState in = testing::random_pm1_state(s, rng, {"x", "y"});
    EXPECT_LE(max_deviation(oh_apply(oh_apply(in, {"x", "y"}), {"x", "y"}), in), 1e-15);
  }
}

TEST(Oh, RejectsOtherOam) {
  const auto s = make_space(3, {"x"});
  EXPECT_EQ(kind_of([&] { oh_apply(basis_state(s, H, 0, "x"), {"x"}); }), ErrorKind::UnsortableOam);
}

TEST(Oh, DecompositionLeavesScratchPathEmpty) {
  const auto s = make_space(3, {"x", "aux"});
  const auto seq = oh_decompose(Photon::A, {"x"}, "aux");
  for (const BasisMode& m : pm1_domain(*s, {"x"})) {
    const PhotonState out = apply_all<PhotonState>(seq, PhotonState(s, {{m, 1.0}}));
    for (const auto& [mode, amp] : out.amplitudes()) EXPECT_EQ(s->path_name(mode.path), "x");
  }
  EXPECT_EQ(kind_of([&] { oh_decompose(Photon::A, {"x"}, "x"); }), ErrorKind::SamePath);
}

TEST(Oh, CalibrationValues) {
  const auto& cal = oh_calibration();
  EXPECT_DOUBLE_EQ(std::abs(cal.input_phase_aux), kPi);
  EXPECT_DOUBLE_EQ(std::abs(cal.output_phase_aux), kPi);
  EXPECT_NEAR(std::abs(cal.global_phase - cplx(1.0, 0.0)), 0.0, kTol);
}

// OAM flip stage.

TEST(DpStage, CanonicalIsPhaseFreeFlip) {
  const auto s = make_space(3, {"x"});
  for (Polarization p : {H, V})
    for (int l = -3; l <= 3; ++l)
      EXPECT_LE(max_deviation(oam_flip_apply(basis_state(s, p, l, "x"), {"x"}), basis_state(s, p, -l, "x")), 0.0);
}

TEST(DpStage, DoveAtMinusQuarterPiOnAnalyzerModes) {
  const auto s = make_space(3, {"x"});
  EXPECT_TRUE(equal_up_to_global_phase(apply_dp(basis_state(s, H, 1, "x"), -kPi / 4, {"x"}), basis_state(s, H, -1, "x"),
                                       kTol));
  EXPECT_TRUE(equal_up_to_global_phase(apply_dp(basis_state(s, V, -1, "x"), -kPi / 4, {"x"}), basis_state(s, V, 1, "x"),
                                       kTol));
}

TEST(DpStage, DecompositionMatchesFlipExactly) {
  const auto s = make_space(3, {"x", "y"});
  const auto seq = dp_stage_decompose(Photon::A, {"x", "y"});
  for (const BasisMode& m : pm1_domain(*s, {"x", "y"})) {
    const PhotonState in(s, {{m, 1.0}});
    EXPECT_LE(max_deviation(apply_all<PhotonState>(seq, in), oam_flip_apply(in, {"x", "y"})), 1e-15);
  }
}

// Decomposition equivalence.

TEST(GateEquiv, PCosDecompositionForSeveralCharges) {
  const auto s = make_space(4, {"x"});
  for (int twice_q : {1, -1, 2, 3}) {
    const auto dom = p_cos_domain(*s, {"x"}, twice_q);
    const auto r = gate_equiv(as_impl(p_cos_decompose(Photon::A, {"x"}, twice_q)),
                              as_impl(GateOp{GateKind::PCos, Photon::A, {"x"}, twice_q}), s, dom, kTol);
    EXPECT_TRUE(r.equivalent) << twice_q << " deviation " << r.max_deviation;
    EXPECT_NEAR(std::abs(r.phase - cplx(1.0, 0.0)), 0.0, kTol);
  }
}

TEST(GateEquiv, OCpsDecomposition) {
  const auto s = make_space(3, {"a", "b"});
  const auto dom = pm1_domain(*s, {"a", "b"});
  const auto r = gate_equiv(as_impl(o_cps_decompose(Photon::A, "a", "b")),
                            as_impl(GateOp{GateKind::OCps, Photon::A, {"a", "b"}}), s, dom, kTol);
  EXPECT_TRUE(r.equivalent) << r.max_deviation;
  EXPECT_NEAR(std::abs(r.phase - ocps_calibration().global_phase), 0.0, kTol);
}

TEST(GateEquiv, OhDecomposition) {
  const auto s = make_space(3, {"x", "y", "aux"});
  const auto dom = pm1_domain(*s, {"x", "y"});
  const auto r = gate_equiv(as_impl(oh_decompose(Photon::A, {"x", "y"}, "aux")),
                            as_impl(GateOp{GateKind::OamHadamard, Photon::A, {"x", "y"}}), s, dom, kTol);
  EXPECT_TRUE(r.equivalent) << r.max_deviation;
}

TEST(GateEquiv, OhEqualsOhCubed) {
  const auto s = make_space(3, {"x"});
  const GateOp oh{GateKind::OamHadamard, Photon::A, {"x"}};
  const auto dom = pm1_domain(*s, {"x"});
  EXPECT_TRUE(gate_equiv(as_impl(oh), as_impl(std::vector<Operation>{oh, oh, oh}), s, dom, kTol).equivalent);
}

TEST(GateEquiv, DifferentChargesAreNotEquivalent) {
  const auto s = make_space(4, {"x"});
  const auto dom = p_cos_domain(*s, {"x"}, 1);
  const auto r = gate_equiv(as_impl(GateOp{GateKind::PCos, Photon::A, {"x"}, 1}),
                            as_impl(GateOp{GateKind::PCos, Photon::A, {"x"}, -1}), s, dom, kTol);
  EXPECT_FALSE(r.equivalent);
}

TEST(GateEquiv, RelativePhaseBetweenColumnsIsDetected) {
  // Same routing, but a -1 on one column only: no single global phase.
  const auto s = make_space(3, {"a", "b"});
  const auto dom = pm1_domain(*s, {"a", "b"});
  std::vector<Operation> tweaked{GateOp{GateKind::OCps, Photon::A, {"a", "b"}},
                                 Element::phase_plate(Photon::A, {"b"}, kPi, V)};
  const auto r = gate_equiv(as_impl(tweaked), as_impl(GateOp{GateKind::OCps, Photon::A, {"a", "b"}}), s, dom, kTol);
  EXPECT_FALSE(r.equivalent);
  EXPECT_NEAR(r.max_deviation, 2.0, kTol);
}

// Row-wise OH sequences.

TEST(OhRows, AllRowsMatchTheirOutputColumn) {
  const auto rows = oh_validate_table1(kTol);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.pass) << "row " << r.row << " " << r.input << " fidelity " << r.fidelity;
    EXPECT_NEAR(r.branch_probability, 0.5, kTol);
  }
  EXPECT_EQ(rows[0].input, "|H,+1,x>");
  EXPECT_EQ(rows[2].input, "|H,-1,x>");
}

TEST(OhRows, RowTwoAgreesWithCanonicalOh) {
  const auto s = make_space(kDefaultLmax, {"x"});
  const auto row = oh_rows().at(1);
  ASSERT_EQ(row.pol, V);
  ASSERT_EQ(row.oam, 1);
  const PhotonState evolved = apply_all<PhotonState>(row.sequence, basis_state(s, V, 1, "x"));
  PhotonState::Map kept;
  for (const auto& [m, a] : evolved.amplitudes())
    if (m.pol == row.projector) kept.emplace(m, a);
  const PhotonState projected = PhotonState(s, kept).normalized();
  EXPECT_TRUE(equal_up_to_global_phase(projected, oh_apply(basis_state(s, V, 1, "x"), {"x"}), kTol));
}

TEST(Catalog, ListsEveryComposite) {
  const auto cat = gate_catalog();
  std::vector<std::string> names;
  for (const auto& g : cat) names.push_back(g.name);
  EXPECT_EQ(names, (std::vector<std::string>{"P_COS", "O_CPS", "OH", "DP_STAGE", "SPPM_FRONT"}));
  for (const auto& g : cat) EXPECT_FALSE(g.decomposition.empty());
}

}  // namespace
}  // namespace hbsa
