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

// Hand-built polarization Bell state times the path-correlated factor.
TwoPhotonState bell_by_hand(BellLabel b, const SpacePtr& s) {
  const bool phi = b == BellLabel::PhiPlus || b == BellLabel::PhiMinus;
  const double sign = b == BellLabel::PhiMinus || b == BellLabel::PsiMinus ? -1.0 : 1.0;
  TwoPhotonState::Map m;
  for (const auto& [pa, pb] : {std::pair{"a1", "a2"}, std::pair{"b1", "b2"}}) {
    m[{make_mode(*s, H, 0, pa), make_mode(*s, phi ? H : V, 0, pb)}] = 0.5;
    m[{make_mode(*s, V, 0, pa), make_mode(*s, phi ? V : H, 0, pb)}] = 0.5 * sign;
  }
  return TwoPhotonState(s, std::move(m));
}

TEST(Input, PreparedStatesAreTheBellStates) {
  const auto s = make_space(4, {"a1", "b1", "a2", "b2"});
  for (BellLabel b : kBellLabels) {
    const TwoPhotonState in = prepare_input(b, s);
    EXPECT_NEAR(in.norm_squared(), 1.0, 1e-15);
    EXPECT_LE(testing::max_deviation(in, bell_by_hand(b, s)), 1e-15);
  }
  // The four inputs are mutually orthogonal.
  for (BellLabel x : kBellLabels)
    for (BellLabel y : kBellLabels) {
      if (x == y) continue;
      EXPECT_NEAR(std::abs(inner(prepare_input(x, s), prepare_input(y, s))), 0.0, 1e-15);
    }
}

TEST(Labels, Spellings) {
  EXPECT_EQ(parse_bell_label("phi+"), BellLabel::PhiPlus);
  EXPECT_EQ(parse_bell_label("PsiMinus"), BellLabel::PsiMinus);
  EXPECT_EQ(parse_bell_label("psi-"), BellLabel::PsiMinus);
  EXPECT_FALSE(parse_bell_label("chi+"));
  EXPECT_FALSE(parse_bell_label(""));
  for (BellLabel b : kBellLabels) {
    EXPECT_EQ(parse_bell_label(to_string(b)), b);
    EXPECT_EQ(parse_bell_label(short_name(b)), b);
  }
}

class Analyzer : public ::testing::TestWithParam<Impl> {};

TEST_P(Analyzer, StageStatesMatchReferences) {
  for (BellLabel b : kBellLabels) {
    const auto snaps = stage_states(b, GetParam());
    ASSERT_EQ(snaps.size(), kCheckpoints.size());
    for (std::size_t g = 0; g < snaps.size(); ++g) {
      EXPECT_EQ(snaps[g].checkpoint, kCheckpoints[g]);
      EXPECT_GE(snaps[g].fidelity, 1.0 - 1e-10) << to_string(b) << " " << to_string(snaps[g].checkpoint);
      EXPECT_NEAR(snaps[g].state.norm_squared(), 1.0, 1e-12);
    }
    EXPECT_EQ(snaps.back().stage, 8);
  }
}

TEST_P(Analyzer, DistributionsAgreeWithTheDenseOracle) {
  const CompiledCircuit c = analyzer_circuit(GetParam());
  const AssembledUnitary u = assemble_unitary(c);
  for (BellLabel b : kBellLabels) {
    const OutcomeDistribution sparse = analyze(c, b, GetParam());
    const OutcomeDistribution dense = dense_analyze(c, u, prepare_input(b, c.space));
    EXPECT_LE(total_variation(sparse, dense), 1e-10);
    // The oracle alone fixes the row: its support, evenly weighted.
    const auto support = dense.support(1e-10);
    ASSERT_FALSE(support.empty());
    const double even = 1.0 / static_cast<double>(support.size());
    for (const auto& p : support) {
      EXPECT_NEAR(dense.probability(p), even, 1e-10) << to_string(p);
      EXPECT_NEAR(sparse.probability(p), even, 1e-10) << to_string(p);
      EXPECT_EQ(classify(p), b) << to_string(p);
    }
    EXPECT_EQ(support.size(), detector_table().preimage(b).size());
    EXPECT_NEAR(dense.total(), 1.0, 1e-10);
  }
}

TEST_P(Analyzer, VerificationPasses) {
  for (int lmax : {2, 3, 4}) {
    const VerificationReport r = verify(GetParam(), nullptr, lmax);
    EXPECT_TRUE(r.pass()) << ::testing::PrintToString(r.failures());
    EXPECT_EQ(r.accuracy_hits, 64);
    EXPECT_EQ(r.accuracy_total, 64);
    EXPECT_NEAR(r.success_probability, 1.0, 1e-10);
    EXPECT_LE(r.oracle_residual, 1e-10);
    ASSERT_EQ(r.labels.size(), 4u);
    for (const auto& lr : r.labels) {
      EXPECT_EQ(lr.support.size(), 16u);
      EXPECT_NEAR(lr.min_probability, 1.0 / 16.0, 1e-10);
      EXPECT_NEAR(lr.max_probability, 1.0 / 16.0, 1e-10);
      EXPECT_LE(lr.mass_outside_row, 1e-10);
      EXPECT_TRUE(lr.path_sector_ok);
    }
  }
}

TEST_P(Analyzer, SuccessProbabilityIsOneForEveryInput) {
  const CompiledCircuit c = analyzer_circuit(GetParam());
  for (BellLabel b : kBellLabels) {
    const OutcomeDistribution d = analyze(c, b, GetParam());
    double hit = 0.0;
    for (std::size_t i = 0; i < d.patterns().size(); ++i)
      if (classify(d.patterns()[i]) == b) hit += d.probabilities()[i];
    EXPECT_NEAR(hit, 1.0, 1e-10) << to_string(b);
  }
}

TEST_P(Analyzer, SuperposedInputsMixRows) {
  const CompiledCircuit c = analyzer_circuit(GetParam());
  const TwoPhotonState mix = superpose<ModePair>(
      {{testing::kR, prepare_input(BellLabel::PhiPlus, c.space)},
       {cplx(0, testing::kR), prepare_input(BellLabel::PsiMinus, c.space)}});
  const OutcomeDistribution d = measure(c, propagate(c, mix), sppm_method(GetParam()));
  double phi_plus = 0.0, psi_minus = 0.0;
  for (std::size_t i = 0; i < d.patterns().size(); ++i) {
    const BellLabel l = classify(d.patterns()[i]);
    if (l == BellLabel::PhiPlus) phi_plus += d.probabilities()[i];
    if (l == BellLabel::PsiMinus) psi_minus += d.probabilities()[i];
  }
  EXPECT_NEAR(phi_plus, 0.5, 1e-10);
  EXPECT_NEAR(psi_minus, 0.5, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(BothImplementations, Analyzer, ::testing::Values(Impl::Canonical, Impl::Decomposed),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Implementations, CanonicalAndDecomposedAgree) {
  for (BellLabel b : kBellLabels)
    EXPECT_LE(total_variation(analyze(b, Impl::Canonical), analyze(b, Impl::Decomposed)), 1e-10);
}

TEST(Table, StructureAndExample) {
  const ClassificationTable& t = detector_table();
  const TableStructure s = t.structure();
  EXPECT_TRUE(s.ok()) << s.problem;
  EXPECT_EQ(t.entries().size(), 64u);
  EXPECT_EQ(classify(parse_pattern("D[+1,H,b1] & D[-1,V,a2]")), BellLabel::PsiPlus);
  for (BellLabel b : kBellLabels) EXPECT_EQ(t.preimage(b).size(), 16u);
}

TEST(Table, WrongSideDetectorsAreMalformed) {
  for (const char* p : {"D[+1,H,a2] & D[+1,H,a1]", "D[+1,H,a1] & D[+1,H,b1]", "D[+1,H,zz] & D[+1,H,a2]"}) {
    try {
      classify(parse_pattern(p));
      ADD_FAILURE() << p;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MalformedPattern);
    }
  }
}

TEST(Table, ParseRejectsBadDocuments) {
  EXPECT_THROW(ClassificationTable::parse("D[+1,H,a1] & D[+1,H,a2]\n", {"a1"}, {"a2"}), Error);
  EXPECT_THROW(ClassificationTable::parse("[Chi]\n", {"a1"}, {"a2"}), Error);
  EXPECT_THROW(ClassificationTable::parse("[PhiPlus]\nD[+1,H,a1]\n", {"a1"}, {"a2"}), Error);
}

TEST(Table, RelabelUnknownPatternThrows) {
  try {
    detector_table().relabeled(parse_pattern("D[+1,H,x] & D[+1,H,y]"), BellLabel::PhiPlus);
    ADD_FAILURE() << "expected MalformedPattern";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedPattern);
  }
}

TEST(Table, TamperedTableFailsVerification) {
  const CoincidencePattern p = parse_pattern("D[+1,H,a1] & D[+1,H,a2]");
  const BellLabel was = classify(p);
  const BellLabel to = was == BellLabel::PhiPlus ? BellLabel::PhiMinus : BellLabel::PhiPlus;
  const ClassificationTable tampered = detector_table().relabeled(p, to);
  EXPECT_EQ(tampered.classify(p), to);
  const VerificationReport r = verify(Impl::Canonical, &tampered);
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.accuracy_hits, 63);
  ASSERT_EQ(r.mismatched.size(), 1u);
  EXPECT_EQ(r.mismatched[0], p);
  EXPECT_FALSE(r.table.sizes_ok);
  EXPECT_FALSE(r.failures().empty());
}

TEST(Checkpoints, ReferenceStatesAreNormalized) {
  const auto s = make_space(4, {"a1", "b1", "a2", "b2"});
  for (BellLabel b : kBellLabels)
    for (Checkpoint cp : kCheckpoints) EXPECT_NEAR(expected_state(b, cp, s).norm_squared(), 1.0, 1e-12);
}

TEST(Checkpoints, StageStatesRequireTheAnalyzerShape) {
  const CompiledCircuit c = compile(parse_circuit("paths a1 b1 a2 b2\nphoton A\nphoton B\n"));
  EXPECT_THROW(stage_states(c, BellLabel::PhiPlus), Error);
}

}  // namespace
}  // namespace hbsa
