#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "delsearch/mechanisms.hpp"
#include "delsearch/model.hpp"
#include "delsearch/strategy.hpp"

namespace delsearch {

// Every evaluator has a plain serial path and an OpenMP path over fixed
// work ranges; both produce identical bytes (exact sums commute, MC chunks
// are merged in chunk order).
enum class Exec { serial, parallel };

inline constexpr std::uint64_t kDefaultEquilibriumCap = 10'000'000;

// ---------------------------------------------------------------------------
// Reports

struct Estimate {
  enum class Kind { rational, real, mc };
  Kind kind = Kind::rational;
  Rational value;      // rational
  double estimate = 0; // real / mc
  double stderr_ = 0;  // mc
  std::uint64_t samples = 0;

  double as_double() const { return kind == Kind::rational ? to_double(value) : estimate; }
  static Estimate exact(Rational v) {
    Estimate e;
    e.kind = Kind::rational;
    e.value = std::move(v);
    e.estimate = to_double(e.value);
    return e;
  }
  static Estimate real(double v) {
    Estimate e;
    e.kind = Kind::real;
    e.estimate = v;
    return e;
  }
  static Estimate mc(double v, double se, std::uint64_t n) {
    Estimate e;
    e.kind = Kind::mc;
    e.estimate = v;
    e.stderr_ = se;
    e.samples = n;
    return e;
  }
};

struct EvaluationReport {
  Estimate principal;
  Estimate opt;
  double ratio = 0.0;
  std::string mode;  // "exact" or "mc"
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  bool zero_win_abstention = false;  // adversarial profiles only
};

struct McResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
};

// ---------------------------------------------------------------------------
// Proposal marginals (honest single-proposal-family profiles factorize
// across agents; these power the exact evaluators and win probabilities)

struct ProposalEntry {
  double x;
  int element;
  Rational mass;
};

struct ProposalMarginal {
  std::vector<ProposalEntry> entries;  // sorted by x ascending, then tie rank
  Rational none;                       // abstain or unacceptable proposal

  // Mass of proposals losing to a proposal of value x on element elem.
  Rational losing_mass(double x, int elem_rank, const TieOrder& tie) const;
  // Pr[proposal x < v] and Pr[proposal x <= v] (none excluded).
  Rational below(double v) const;
  Rational at_most(double v) const;
};

// Marginal of one agent's accepted-proposal value under an honest strategy.
// Fails on lying actions (those need the joint evaluator).
ProposalMarginal proposal_marginal(const Instance& inst, const Mechanism& mech,
                                   const Strategy& strategy);

// E[winner's x] from independent per-agent marginals (exact).
Rational expected_winner_x(const Instance& inst, const Mechanism& mech,
                           const std::vector<ProposalMarginal>& marginals);

// ---------------------------------------------------------------------------
// Exact evaluation

// E[max over elements of x], exact for finite supports.
Rational expected_opt_exact(const Instance& inst);
// Closed-form composition for atomless/mixed instances: integrates
// 1 - prod F_e by adaptive Simpson, exponential tails added analytically.
double expected_opt_quadrature(const Instance& inst, double tol = 1e-9);
McResult expected_opt_mc(const Instance& inst, std::uint64_t samples, std::uint64_t seed,
                         Exec exec = Exec::parallel);

// Sum over the joint type space of mass * x(allocation); lies and rejections
// contribute 0. Works for every mechanism kind (Myerson agents report
// truthfully; the profile is ignored in that case).
Rational exact_expected_principal(const Instance& inst, const Mechanism& mech,
                                  const StrategyProfile& profile,
                                  std::uint64_t cap = kDefaultProfileCap,
                                  Exec exec = Exec::parallel);

// Factorized exact evaluator for honest single-proposal-family profiles.
Rational expected_principal_factored(const Instance& inst, const Mechanism& mech,
                                     const StrategyProfile& profile);

// Pr over other agents' types that `action` taken at `type_index` wins,
// holding the rest of the profile fixed.
Rational win_probability(const Instance& inst, const Mechanism& mech,
                         const StrategyProfile& profile, int agent, std::uint64_t type_index,
                         const AgentAction& action);

struct OutcomeRef {
  int element = -1;
  int atom = -1;
  friend bool operator==(const OutcomeRef&, const OutcomeRef&) = default;
};

// winner[i] for joint profile index i (lexicographic over elements).
struct AllocationTable {
  std::vector<std::optional<OutcomeRef>> winner;
  friend bool operator==(const AllocationTable&, const AllocationTable&) = default;
};

AllocationTable allocation_table(const Instance& inst, const Mechanism& mech,
                                 const StrategyProfile& profile,
                                 std::uint64_t cap = kDefaultProfileCap);

// ---------------------------------------------------------------------------
// Monte Carlo evaluation (chunk-deterministic: results do not depend on
// thread count, only on the seed)

McResult mc_expected_principal(const Instance& inst, const Mechanism& mech,
                               const StrategyProfile& profile, std::uint64_t samples,
                               std::uint64_t seed, Exec exec = Exec::parallel);

// Pessimistic adversarial agents evaluated pointwise per sample; supports
// atomless instances.
McResult mc_adversarial_principal(const Instance& inst, const Mechanism& mech,
                                  std::uint64_t samples, std::uint64_t seed,
                                  Exec exec = Exec::parallel);

// Chunk-deterministic estimator for an arbitrary per-sample statistic.
McResult mc_estimate(std::uint64_t samples, std::uint64_t seed, Exec exec,
                     const std::function<double(Rng&)>& per_sample);

// ---------------------------------------------------------------------------

enum class EvalMode { exact, mc };

EvaluationReport delegation_ratio(const Instance& inst, const Mechanism& mech,
                                  const StrategyProfile& profile, EvalMode mode,
                                  std::uint64_t samples = 0, std::uint64_t seed = 0,
                                  Exec exec = Exec::parallel,
                                  std::uint64_t cap = kDefaultProfileCap);

}  // namespace delsearch
