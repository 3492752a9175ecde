#pragma once

#include <cstdint>
#include <vector>

#include "delsearch/engine.hpp"
#include "delsearch/mechanisms.hpp"
#include "delsearch/model.hpp"

namespace delsearch {

// Unique positive root of p^k + p - 1 = 0 by bisection; |residual| <= 1e-12.
double solve_p(int k);

enum class PlanProvenance { atomless, atom_split, shuffled };

struct ThresholdPlan {
  double p = 0.0;  // target approximation factor (shuffled plans: q = 1 - p)
  double t = 0.0;  // threshold value
  std::vector<ThresholdMode> agent_modes;  // one per agent
  PlanProvenance provenance = PlanProvenance::atomless;
  bool has_atom = false;
  double atom_x = 0.0;  // blocking value x'
  double phi = 0.0;     // split probability in (0, 1]

  int strict_count() const {
    int n = 0;
    for (ThresholdMode m : agent_modes)
      if (m == ThresholdMode::strict) ++n;
    return n;
  }
};

// Fully-symmetric weak threshold at the p-quantile of the per-agent max;
// needs an agent-symmetric atomless instance.
ThresholdPlan atomless_threshold_plan(const Instance& inst);

// One plan when the exact quantile exists, otherwise the k+1 determinized
// plans (j = 0..k agents strict at the blocking atom).
std::vector<ThresholdPlan> atom_split_plan(const Instance& inst);

// Same construction against the pool-wide maximum with Pr[max < t] = 1 - p.
std::vector<ThresholdPlan> shuffled_threshold_plans(const Instance& pool, int k);

// Threshold mechanism realizing a plan on an instance with assigned owners.
ThresholdMechanism plan_mechanism(const ThresholdPlan& plan, const Instance& inst);

// Exact expected principal utility under the pessimistic adversarial
// profile (finite supports).
Rational pessimistic_exact_utility(const Instance& inst, const Mechanism& mech);

enum class ShuffleVariant { independent, balanced };

// Assigns pool elements to agents: independently uniform owners, or a
// uniformly random equipartition (k must divide the pool size).
Instance assign_shuffled(const Instance& pool, int k, std::uint64_t seed,
                         ShuffleVariant variant = ShuffleVariant::independent);

// All assignments with their probabilities (k^n owner vectors, or the
// labeled equipartitions), for exact shuffled expectations.
std::vector<std::pair<std::vector<int>, Rational>> enumerate_assignments(
    const Instance& pool, int k, ShuffleVariant variant, std::uint64_t cap = kDefaultProfileCap);

Instance with_owners(const Instance& pool, const std::vector<int>& owners, int k);

struct ShuffledEvaluation {
  Rational expected_principal;  // expectation over assignments and types
  Rational expected_opt;        // assignment-independent
  double ratio = 0.0;
  std::uint64_t assignments = 0;
};

// Exact expectation over every assignment of the plan's pessimistic
// adversarial utility (finite pools, k^n or equipartition enumeration).
ShuffledEvaluation shuffled_exact_evaluation(const Instance& pool, int k,
                                             const ThresholdPlan& plan, ShuffleVariant variant,
                                             std::uint64_t cap = kDefaultProfileCap);

// Monte Carlo counterpart: samples an assignment, then types.
McResult shuffled_mc_evaluation(const Instance& pool, int k, const ThresholdPlan& plan,
                                ShuffleVariant variant, std::uint64_t samples, std::uint64_t seed,
                                Exec exec = Exec::parallel);

// The two-outcome family showing the 1 - 1/(2k+1) ceiling: every agent gets
// two i.i.d. elements with x = 1 (mass 1-eps) and x = 1/eps (mass eps).
Instance hard_instance(int k, const Rational& eps);

struct HardInstanceFormulas {
  Rational e_opt;
  Rational e_a;    // accept only the high outcome everywhere
  Rational e_b;    // one low-threshold element for one agent
  Rational ratio;  // max(e_a, e_b) / e_opt
  Rational limit;  // 1 - 1/(2k+1)
};

HardInstanceFormulas hard_instance_formulas(int k, const Rational& eps);

// Mechanisms A and B from the upper-bound argument, as thresholds.
ThresholdMechanism hard_mechanism_a(const Instance& inst, const Rational& eps);
ThresholdMechanism hard_mechanism_b(const Instance& inst, const Rational& eps);

struct ScanResult {
  SingleProposalMechanism best;
  Rational best_utility;
  std::uint64_t mechanism_count = 0;
  std::uint64_t best_index = 0;
  std::uint64_t argmax_count = 0;
};

// Enumerates every assignment of per-element acceptance subsets and
// evaluates each exactly under the pessimistic adversarial profile.
ScanResult exhaustive_mechanism_scan(const Instance& inst, std::uint64_t cap = 1'000'000,
                                     Exec exec = Exec::parallel);

struct AsymptoticsRecord {
  int k = 0;
  double r_minus = 0.0;  // 1 + ln k
  double r_plus = 0.0;   // (ln k - ln ln k) / 2
  double g_minus = 0.0;
  double g_plus = 0.0;
  double p = 0.0;
  double lower = 0.0;  // 1 - r_minus / k
  double upper = 0.0;  // 1 - r_plus / k
  bool bracket_ok = false;   // g_minus < 0 < g_plus
  bool p_inside = false;     // lower < p < upper
};

// g(r) = (1 - r/k)^k - r/k evaluated at the bracketing points; k >= 2.
AsymptoticsRecord asymptotic_check(int k);

}  // namespace delsearch
