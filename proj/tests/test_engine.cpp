#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace delsearch;
using namespace delsearch::testing;

TEST_CASE("expected_opt_exact: two fair coins") {
  Instance inst = make_instance(1, Flavor::adversarial,
                                {el_finite(1, {{0.0, 1, 2}, {1.0, 1, 2}}),
                                 el_finite(1, {{0.0, 1, 2}, {1.0, 1, 2}})});
  CHECK(expected_opt_exact(inst) == rat(3, 4));
}

TEST_CASE("expected_opt_exact: hard instance matches the closed form") {
  CHECK(expected_opt_exact(hard_instance(2, rat(1, 10))) == rat(40951, 10000));
  CHECK(expected_opt_exact(hard_instance(2, rat(1, 2))) == rat(31, 16));
}

TEST_CASE("expected_opt by quadrature and MC: two uniforms give 2/3") {
  Instance inst = make_instance(1, Flavor::adversarial,
                                {el_uniform(1, 0, 1), el_uniform(1, 0, 1)});
  CHECK(expected_opt_quadrature(inst) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  McResult mc = expected_opt_mc(inst, 1'000'000, 7);
  CHECK(std::abs(mc.estimate - 2.0 / 3.0) < 0.002);
}

TEST_CASE("expected_opt quadrature handles exponential tails") {
  // max of two iid Exp(1): E = 3/2
  Instance inst = make_instance(1, Flavor::adversarial,
                                {el_exponential(1, 1.0), el_exponential(1, 1.0)});
  CHECK(expected_opt_quadrature(inst) == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("exact_expected_principal: single-element truthful example") {
  Instance inst = make_instance(1, Flavor::adversarial,
                                {el_finite(1, {{0.0, 1, 2}, {1.0, 1, 2}})});
  ThresholdMechanism mech = uniform_threshold(inst, 1.0);
  StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
  CHECK(exact_expected_principal(inst, Mechanism{mech}, prof) == rat(1, 2));
}

TEST_CASE("exact_expected_principal matches formulas on the hard instance") {
  const Rational eps = rat(1, 10);
  Instance inst = hard_instance(2, eps);
  auto f = hard_instance_formulas(2, eps);
  CHECK(f.e_a == rat(3439, 1000));

  Mechanism a{hard_mechanism_a(inst, eps)};
  Mechanism b{hard_mechanism_b(inst, eps)};
  StrategyProfile pa = adversarial_profile(inst, a).profile;
  StrategyProfile pb = adversarial_profile(inst, b).profile;
  CHECK(exact_expected_principal(inst, a, pa) == f.e_a);
  CHECK(exact_expected_principal(inst, b, pb) == f.e_b);
  CHECK(f.e_a == f.e_b);
}

TEST_CASE("joint, factored, and oracle evaluations agree") {
  Rng rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    Instance inst = random_finite_symmetric(rng, 2 + static_cast<int>(rng.below(2)), 2, 3);
    ThresholdMechanism mech = random_threshold_mechanism(rng, inst, false);
    StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
    Rational joint = exact_expected_principal(inst, Mechanism{mech}, prof);
    Rational factored = expected_principal_factored(inst, Mechanism{mech}, prof);
    Rational oracle = oracle_expected_principal(inst, Mechanism{mech}, prof);
    CHECK(joint == oracle);
    CHECK(factored == oracle);
  }
}

TEST_CASE("expected principal never exceeds expected opt") {
  Rng rng(37);
  for (int trial = 0; trial < 15; ++trial) {
    Instance inst = random_finite_symmetric(rng, 2, 2, 4);
    ThresholdMechanism mech = random_threshold_mechanism(rng, inst, false);
    StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
    CHECK(exact_expected_principal(inst, Mechanism{mech}, prof) <= expected_opt_exact(inst));
  }
}

TEST_CASE("mc_expected_principal: deterministic instance has zero stderr") {
  Instance inst = make_instance(1, Flavor::adversarial, {el_finite(1, {{4.0, 1, 1}})});
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
  McResult r = mc_expected_principal(inst, Mechanism{mech}, prof, 1000, 5);
  CHECK(r.estimate == 4.0);
  CHECK(r.stderr_ == 0.0);
}

TEST_CASE("mc_expected_principal: same seed gives bit-identical results") {
  Instance inst = hard_instance(2, rat(1, 10));
  Mechanism mech{hard_mechanism_a(inst, rat(1, 10))};
  StrategyProfile prof = adversarial_profile(inst, mech).profile;
  McResult r1 = mc_expected_principal(inst, mech, prof, 100000, 17);
  McResult r2 = mc_expected_principal(inst, mech, prof, 100000, 17);
  CHECK(r1.estimate == r2.estimate);
  CHECK(r1.stderr_ == r2.stderr_);
  McResult r3 = mc_expected_principal(inst, mech, prof, 100000, 18);
  CHECK(r1.estimate != r3.estimate);
}

TEST_CASE("mc agrees with the exact value within 4 standard errors") {
  const Rational eps = rat(1, 10);
  Instance inst = hard_instance(2, eps);
  Mechanism mech{hard_mechanism_a(inst, eps)};
  StrategyProfile prof = adversarial_profile(inst, mech).profile;
  const double exact = to_double(exact_expected_principal(inst, mech, prof));
  McResult r = mc_expected_principal(inst, mech, prof, 1'000'000, 29);
  CHECK(std::abs(r.estimate - exact) <= 4.0 * r.stderr_);

  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    Instance fi = random_finite_symmetric(rng, 2, 2, 3);
    ThresholdMechanism tm = random_threshold_mechanism(rng, fi, false);
    StrategyProfile fp = adversarial_profile(fi, Mechanism{tm}).profile;
    double ex = to_double(exact_expected_principal(fi, Mechanism{tm}, fp));
    McResult mr = mc_expected_principal(fi, Mechanism{tm}, fp, 200000, 100 + trial);
    CHECK(std::abs(mr.estimate - ex) <= 4.0 * mr.stderr_ + 1e-12);
  }
}

TEST_CASE("allocation_table basics") {
  Instance one = make_instance(1, Flavor::adversarial, {el_finite(1, {{4.0, 1, 1}})});
  ThresholdMechanism accept_all = uniform_threshold(one, 0.0);
  StrategyProfile prof = adversarial_profile(one, Mechanism{accept_all}).profile;
  AllocationTable t = allocation_table(one, Mechanism{accept_all}, prof);
  REQUIRE(t.winner.size() == 1);
  REQUIRE(t.winner[0].has_value());
  CHECK(t.winner[0]->element == 0);

  ThresholdMechanism reject_all = uniform_threshold(one, 10.0);
  StrategyProfile prof2 = adversarial_profile(one, Mechanism{reject_all}).profile;
  AllocationTable t2 = allocation_table(one, Mechanism{reject_all}, prof2);
  CHECK_FALSE(t2.winner[0].has_value());
}

TEST_CASE("allocation_table: hard instance high-proposal structure") {
  const Rational eps = rat(1, 2);
  Instance inst = hard_instance(2, eps);
  Mechanism mech{hard_mechanism_a(inst, eps)};
  StrategyProfile prof = adversarial_profile(inst, mech).profile;
  AllocationTable table = allocation_table(inst, mech, prof);
  std::uint64_t idx = 0;
  for (const auto& [tp, mass] : enumerate_type_profiles(inst)) {
    bool any_high = false;
    for (const Outcome& o : tp.outcomes) any_high = any_high || o.x == 2.0;
    REQUIRE(idx < table.winner.size());
    CHECK(table.winner[idx].has_value() == any_high);
    if (any_high) CHECK(inst.outcome_at(table.winner[idx]->element, table.winner[idx]->atom).x == 2.0);
    ++idx;
  }
}

TEST_CASE("win_probability: sole agent and two-agent tie order case") {
  Instance solo = make_instance(1, Flavor::adversarial, {el_finite(1, {{3.0, 1, 1}})});
  ThresholdMechanism accept = uniform_threshold(solo, 0.0);
  StrategyProfile prof = adversarial_profile(solo, Mechanism{accept}).profile;
  CHECK(win_probability(solo, Mechanism{accept}, prof, 1, 0, AgentAction{0, -1}) == 1);

  ThresholdMechanism reject = uniform_threshold(solo, 5.0);
  StrategyProfile prof2 = adversarial_profile(solo, Mechanism{reject}).profile;
  CHECK(win_probability(solo, Mechanism{reject}, prof2, 1, 0, AgentAction{0, -1}) == 0);

  // 2 agents, iid {1: 1/2, 3: 1/2}, threshold 1 weak, adversarial opponents.
  Instance duo = make_instance(2, Flavor::adversarial,
                               {el_finite(1, {{1.0, 1, 2}, {3.0, 1, 2}}),
                                el_finite(2, {{1.0, 1, 2}, {3.0, 1, 2}})});
  ThresholdMechanism mech = uniform_threshold(duo, 1.0);
  StrategyProfile dprof = adversarial_profile(duo, Mechanism{mech}).profile;
  // agent 1 proposing x=3 (type where element 0 realized atom 1): the
  // opponent proposes its minimum; equal-x ties break toward element 0
  Strategy& s1 = dprof.of(1);
  std::uint64_t type_high = s1.type_index(std::vector<int>{1});
  CHECK(win_probability(duo, Mechanism{mech}, dprof, 1, type_high, AgentAction{0, -1}) == 1);
  // agent 2 proposing x=3 loses the tie against an opponent x=3
  Strategy& s2 = dprof.of(2);
  std::uint64_t type_high2 = s2.type_index(std::vector<int>{1});
  CHECK(win_probability(duo, Mechanism{mech}, dprof, 2, type_high2, AgentAction{1, -1}) ==
        rat(1, 2));
}

TEST_CASE("delegation_ratio: lossless, hard-instance, and rejecting mechanisms") {
  Instance one = make_instance(1, Flavor::adversarial, {el_finite(1, {{4.0, 1, 2}, {2.0, 1, 2}})});
  ThresholdMechanism accept_all = uniform_threshold(one, 0.0);
  StrategyProfile prof = adversarial_profile(one, Mechanism{accept_all}).profile;
  EvaluationReport lossless = delegation_ratio(one, Mechanism{accept_all}, prof, EvalMode::exact);
  CHECK(lossless.ratio == doctest::Approx(1.0));

  const Rational eps = rat(1, 10);
  Instance hard = hard_instance(2, eps);
  Mechanism a{hard_mechanism_a(hard, eps)};
  StrategyProfile pa = adversarial_profile(hard, a).profile;
  EvaluationReport r = delegation_ratio(hard, a, pa, EvalMode::exact);
  CHECK(r.ratio == doctest::Approx(0.83978).epsilon(1e-4));

  ThresholdMechanism reject = uniform_threshold(hard, 100.0);
  StrategyProfile pr = adversarial_profile(hard, Mechanism{reject}).profile;
  EvaluationReport zero = delegation_ratio(hard, Mechanism{reject}, pr, EvalMode::exact);
  CHECK(zero.ratio == 0.0);
}

TEST_CASE("tie-order permutation leaves expected principal unchanged") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_finite_symmetric(rng, 2, 2, 3);
    ThresholdMechanism mech = random_threshold_mechanism(rng, inst, false);
    ThresholdMechanism permuted = mech;
    std::vector<int> order = mech.tie.order;
    std::reverse(order.begin(), order.end());
    permuted.tie = TieOrder::from_order(order);
    Rational va = pessimistic_exact_utility(inst, Mechanism{mech});
    Rational vb = pessimistic_exact_utility(inst, Mechanism{permuted});
    CHECK(va == vb);
  }
}

TEST_CASE("prophet-style decomposition holds for the quantile threshold") {
  // agent-symmetric atomless instance: E[principal] >= (1-p^k) t + p (E[X*]-t)^+
  Rng rng(47);
  Instance inst = random_atomless_symmetric(rng, 3, 2);
  ThresholdPlan plan = atomless_threshold_plan(inst);
  Mechanism mech{plan_mechanism(plan, inst)};
  McResult mc = mc_adversarial_principal(inst, mech, 400000, 9);
  const double p = plan.p;
  const double e_star = expected_opt_quadrature(inst);
  const double bound =
      (1.0 - std::pow(p, inst.k())) * plan.t + p * std::max(0.0, e_star - plan.t);
  CHECK(mc.estimate >= bound - 4.0 * mc.stderr_ - 1e-6);
}

TEST_CASE("random single-proposal acceptance sets: joint, factored, oracle agree") {
  Rng rng(137);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_finite_symmetric(rng, 2, 2, 3);
    // random extensional masks per element
    SingleProposalMechanism mech;
    mech.tie = TieOrder::default_order(inst);
    for (int e = 0; e < inst.element_count(); ++e) {
      const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
      std::vector<char> mask(fs->atoms.size());
      for (auto& b : mask) b = rng.below(2) ? 1 : 0;
      mech.accept.push_back(AcceptanceSet::outcomes(std::move(mask)));
    }
    StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
    Rational oracle = oracle_expected_principal(inst, Mechanism{mech}, prof);
    CHECK(exact_expected_principal(inst, Mechanism{mech}, prof) == oracle);
    CHECK(expected_principal_factored(inst, Mechanism{mech}, prof) == oracle);
  }
}

TEST_CASE("lying strategies: joint evaluation matches the oracle, factored refuses") {
  Instance inst = make_instance(2, Flavor::adversarial,
                                {el_finite(1, {{1.0, 1, 2}, {5.0, 1, 2}}),
                                 el_finite(2, {{2.0, 1, 1}})});
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
  // agent 1 always claims the x=5 outcome, truthfully or not
  Strategy& s1 = prof.of(1);
  for (std::uint64_t t = 0; t < s1.type_count(); ++t) s1.at(t) = AgentAction{0, 1};
  Rational oracle = oracle_expected_principal(inst, Mechanism{mech}, prof);
  CHECK(exact_expected_principal(inst, Mechanism{mech}, prof) == oracle);
  // the lie voids the round half the time: E = (1/2) 5 + (1/2) 0
  CHECK(oracle == rat(5, 2));
  CHECK_THROWS_WITH_AS(expected_principal_factored(inst, Mechanism{mech}, prof),
                       doctest::Contains("LyingStrategy"), Error);
}

TEST_CASE("myerson: exact enumeration agrees with truthful Monte Carlo") {
  Rng rng(139);
  Instance inst = random_strategic(rng, 2, 2, 3);
  MyersonMechanism mech = random_myerson(rng, inst);
  StrategyProfile unused = empty_profile(inst);
  Rational exact = exact_expected_principal(inst, Mechanism{mech}, unused);
  McResult mc = mc_expected_principal(inst, Mechanism{mech}, unused, 300000, 17);
  CHECK(std::abs(mc.estimate - to_double(exact)) <= 4.0 * mc.stderr_ + 1e-12);
}

TEST_CASE("delegation_ratio rejects zero expected opt") {
  Instance inst = make_instance(1, Flavor::adversarial, {el_finite(1, {{0.0, 1, 1}})});
  ThresholdMechanism mech = uniform_threshold(inst, 0.0);
  StrategyProfile prof = adversarial_profile(inst, Mechanism{mech}).profile;
  CHECK_THROWS_WITH_AS(delegation_ratio(inst, Mechanism{mech}, prof, EvalMode::exact),
                       doctest::Contains("ZeroOpt"), Error);
}

TEST_CASE("quadrature agrees with the exact sweep on finite instances") {
  Rng rng(149);
  for (int trial = 0; trial < 5; ++trial) {
    Instance inst = random_finite_symmetric(rng, 2, 2, 4);
    CHECK(expected_opt_quadrature(inst) ==
          doctest::Approx(to_double(expected_opt_exact(inst))).epsilon(1e-8));
  }
}
