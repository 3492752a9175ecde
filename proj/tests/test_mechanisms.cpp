#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace delsearch;
using namespace delsearch::testing;

namespace {

Instance two_agent_pair() {
  // two agents, one element each: {x=3}, {x=5}
  return make_instance(2, Flavor::adversarial,
                       {el_finite(1, {{3.0, 1, 1}}), el_finite(2, {{5.0, 1, 1}})});
}

TypeProfile truth_of(const Instance& inst, const std::vector<int>& atoms) {
  TypeProfile tp;
  for (int e = 0; e < inst.element_count(); ++e) tp.outcomes.push_back(inst.outcome_at(e, atoms[e]));
  return tp;
}

}  // namespace

TEST_CASE("threshold acceptance boundaries") {
  Instance inst = make_instance(1, Flavor::adversarial, {el_finite(1, {{2.0, 1, 2}, {5.0, 1, 2}})});
  ThresholdMechanism weak = uniform_threshold(inst, 2.0, ThresholdMode::weak);
  ThresholdMechanism strict = uniform_threshold(inst, 2.0, ThresholdMode::strict);
  Outcome at = inst.outcome_at(0, 0);   // x = 2
  Outcome above = inst.outcome_at(0, 1);  // x = 5
  CHECK(acceptable(weak, inst, at));
  CHECK_FALSE(acceptable(strict, inst, at));
  CHECK(acceptable(weak, inst, above));
}

TEST_CASE("acceptable rejects foreign elements") {
  Instance inst = make_instance(1, Flavor::adversarial, {el_finite(1, {{2.0, 1, 1}})});
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  Outcome bogus{5, 0, 2.0, std::nullopt};
  CHECK_THROWS_WITH_AS(acceptable(mech, inst, bogus), doctest::Contains("UnknownElement"), Error);
}

TEST_CASE("allocate_single_proposal picks the max acceptable x") {
  Instance inst = two_agent_pair();
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  TypeProfile truth = truth_of(inst, {0, 0});
  std::vector<Proposal> proposals{{1, inst.outcome_at(0, 0)}, {2, inst.outcome_at(1, 0)}};
  auto winner = allocate_single_proposal(Mechanism{mech}, inst, proposals, truth);
  REQUIRE(winner.has_value());
  CHECK(winner->x == 5.0);
}

TEST_CASE("allocate_single_proposal detects lies") {
  // agent claims x=5 on an element whose truth is x=1
  Instance inst = make_instance(2, Flavor::adversarial,
                                {el_finite(1, {{1.0, 1, 2}, {5.0, 1, 2}}),
                                 el_finite(2, {{3.0, 1, 1}})});
  ThresholdMechanism mech = uniform_threshold(inst, 4.0);
  TypeProfile truth = truth_of(inst, {0, 0});  // element 0 realized x=1
  std::vector<Proposal> proposals{{1, inst.outcome_at(0, 1)}};  // claim x=5
  auto winner = allocate_single_proposal(Mechanism{mech}, inst, proposals, truth);
  CHECK_FALSE(winner.has_value());
}

TEST_CASE("allocate_single_proposal rejects when nothing is acceptable") {
  Instance inst = two_agent_pair();
  ThresholdMechanism mech = uniform_threshold(inst, 10.0);
  TypeProfile truth = truth_of(inst, {0, 0});
  std::vector<Proposal> proposals{{1, inst.outcome_at(0, 0)}, {2, inst.outcome_at(1, 0)}};
  CHECK_FALSE(allocate_single_proposal(Mechanism{mech}, inst, proposals, truth).has_value());
}

TEST_CASE("allocate_single_proposal rejects duplicate proposals") {
  Instance inst = two_agent_pair();
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  TypeProfile truth = truth_of(inst, {0, 0});
  std::vector<Proposal> proposals{{1, inst.outcome_at(0, 0)}, {1, inst.outcome_at(0, 0)}};
  CHECK_THROWS_WITH_AS(allocate_single_proposal(Mechanism{mech}, inst, proposals, truth),
                       doctest::Contains("DuplicateProposal"), Error);
}

TEST_CASE("allocation is deterministic") {
  Instance inst = two_agent_pair();
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  TypeProfile truth = truth_of(inst, {0, 0});
  std::vector<Proposal> proposals{{1, inst.outcome_at(0, 0)}, {2, inst.outcome_at(1, 0)}};
  auto a = allocate_single_proposal(Mechanism{mech}, inst, proposals, truth);
  auto b = allocate_single_proposal(Mechanism{mech}, inst, proposals, truth);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(same_outcome(*a, *b));
}

TEST_CASE("tie order changes the winner identity but never the accepted x") {
  // both agents hold an element with the same support; ties at every value
  Instance inst = make_instance(2, Flavor::adversarial,
                                {el_finite(1, {{2.0, 1, 2}, {4.0, 1, 2}}),
                                 el_finite(2, {{2.0, 1, 2}, {4.0, 1, 2}})});
  ThresholdMechanism a = uniform_threshold(inst, 0.0);
  ThresholdMechanism b = a;
  b.tie = TieOrder::from_order({1, 0});
  StrategyProfile prof = adversarial_profile(inst, Mechanism{a}).profile;
  for (const auto& [tp, mass] : enumerate_type_profiles(inst)) {
    auto proposals = proposals_of(inst, prof, tp);
    auto wa = allocate_single_proposal(Mechanism{a}, inst, proposals, tp);
    auto wb = allocate_single_proposal(Mechanism{b}, inst, proposals, tp);
    REQUIRE(wa.has_value());
    REQUIRE(wb.has_value());
    CHECK(wa->x == wb->x);
  }
}

TEST_CASE("threshold_as_single_proposal maps thresholds to outcome sets") {
  Instance inst = make_instance(1, Flavor::adversarial, {el_finite(1, {{1.0, 1, 2}, {3.0, 1, 2}})});
  SingleProposalMechanism sp =
      threshold_as_single_proposal(uniform_threshold(inst, 2.0), inst);
  CHECK_FALSE(acceptable(sp, inst, inst.outcome_at(0, 0)));
  CHECK(acceptable(sp, inst, inst.outcome_at(0, 1)));

  SingleProposalMechanism all = threshold_as_single_proposal(uniform_threshold(inst, 0.0), inst);
  CHECK(acceptable(all, inst, inst.outcome_at(0, 0)));
  CHECK(acceptable(all, inst, inst.outcome_at(0, 1)));
}

TEST_CASE("threshold_as_single_proposal agrees with threshold semantics everywhere") {
  Instance inst = hard_instance(2, rat(1, 2));
  ThresholdMechanism mech = uniform_threshold(inst, 2.0);
  Mechanism as_sp{threshold_as_single_proposal(mech, inst)};
  StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
  CHECK(allocation_table(inst, Mechanism{mech}, prof) == allocation_table(inst, as_sp, prof));
}

TEST_CASE("allocate_myerson case 3 single candidate") {
  Instance inst = make_instance(
      2, Flavor::strategic,
      {el_finite(1, {{5.0, 1, 1, 1.0}}), el_finite(2, {{3.0, 1, 1, 1.0}})});
  MyersonMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.phi.resize(2);  // identity (empty breakpoint list)
  TypeProfile truth = truth_of(inst, {0, 0});
  auto w = allocate_myerson(mech, inst, truth, truth);
  REQUIRE(w.has_value());
  CHECK(w->x == 5.0);
}

TEST_CASE("allocate_myerson case 3 maximizes y among dominant outcomes") {
  Instance inst = make_instance(
      2, Flavor::strategic,
      {el_finite(1, {{5.0, 1, 1, 1.0}}), el_finite(1, {{4.0, 1, 1, 9.0}}),
       el_finite(2, {{3.0, 1, 1, 2.0}})});
  MyersonMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.phi.resize(3);  // identity
  TypeProfile truth = truth_of(inst, {0, 0, 0});
  auto w = allocate_myerson(mech, inst, truth, truth);
  REQUIRE(w.has_value());
  CHECK(w->x == 4.0);
  CHECK(w->y == 9.0);
}

TEST_CASE("allocate_myerson rejects when every virtual value is negative") {
  Instance inst = make_instance(1, Flavor::strategic, {el_finite(1, {{1.0, 1, 1, 1.0}})});
  MyersonMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  PiecewiseLinearFn fn;
  fn.points = {{0.0, -2.0}, {10.0, -1.0}};
  mech.phi = {fn};
  TypeProfile truth = truth_of(inst, {0});
  CHECK_FALSE(allocate_myerson(mech, inst, truth, truth).has_value());
}

TEST_CASE("allocate_myerson with truthful reports never trips the lie check") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_strategic(rng, 2, 2, 3);
    MyersonMechanism mech = random_myerson(rng, inst);
    for (const auto& [tp, mass] : enumerate_type_profiles(inst)) {
      auto w = allocate_myerson(mech, inst, tp, tp);
      if (!w.has_value()) continue;
      // a truthful rejection can only come from case 1 or an empty case 3,
      // never from the lie check: accepted outcomes match the truth
      CHECK(same_outcome(*w, tp.outcomes[static_cast<std::size_t>(w->element)]));
    }
  }
}

TEST_CASE("fully-symmetric threshold mechanisms are permutation-equivariant") {
  Instance inst = hard_instance(3, rat(1, 4));
  ThresholdMechanism mech = uniform_threshold(inst, 4.0);
  REQUIRE(fully_symmetric(mech, inst));
  TypeProfile truth = truth_of(inst, {1, 0, 0, 0, 0, 1});
  // agent 1 holds a high on element 0; agent 3 holds a high on element 5
  std::vector<Proposal> p1{{1, inst.outcome_at(0, 1)}, {3, inst.outcome_at(5, 1)}};
  auto w1 = allocate_single_proposal(Mechanism{mech}, inst, p1, truth);
  REQUIRE(w1.has_value());
  CHECK(w1->element == 0);  // tie on x, earlier element wins

  // permute agents 1 <-> 3: the winner permutes identically
  TypeProfile truth2 = truth_of(inst, {0, 1, 0, 0, 1, 0});
  std::vector<Proposal> p2{{3, inst.outcome_at(4, 1)}, {1, inst.outcome_at(1, 1)}};
  auto w2 = allocate_single_proposal(Mechanism{mech}, inst, p2, truth2);
  REQUIRE(w2.has_value());
  CHECK(w2->element == 1);
}

TEST_CASE("mechanism symmetry predicates") {
  Instance inst = hard_instance(2, rat(1, 2));
  ThresholdMechanism fully = uniform_threshold(inst, 1.0);
  CHECK(element_symmetric(fully, inst));
  CHECK(agent_symmetric(fully, inst));
  CHECK(fully_symmetric(fully, inst));

  ThresholdMechanism agent_only = fully;
  agent_only.theta[0].value = 2.0;  // element 1 of each agent differs
  agent_only.theta[2].value = 2.0;
  CHECK(agent_symmetric(agent_only, inst));
  CHECK_FALSE(element_symmetric(agent_only, inst));

  ThresholdMechanism neither = fully;
  neither.theta[0].value = 2.0;
  CHECK_FALSE(agent_symmetric(neither, inst));
  CHECK_FALSE(element_symmetric(neither, inst));
}
