#pragma once

#include <cstdint>
#include <span>

#include "delsearch/engine.hpp"
#include "delsearch/mechanisms.hpp"
#include "delsearch/model.hpp"
#include "delsearch/strategy.hpp"

namespace delsearch {

enum class AdversarialMode { pessimistic, constrained };

// Lowest-x acceptable observed outcome (ties by outcome id), Abstain when
// nothing observed is acceptable. own_type lists the agent's realized
// outcomes in instance order of their elements. Constrained mode consults
// the profile-wide fixpoint.
AgentAction adversarial_propose(const Instance& inst, const Mechanism& mech, int agent,
                                std::span<const Outcome> own_type,
                                AdversarialMode mode = AdversarialMode::pessimistic);

struct AdversarialProfileResult {
  StrategyProfile profile;
  // Some type had acceptable proposals but none with positive win
  // probability, and was left abstaining.
  bool zero_win_abstention = false;
  std::uint64_t escalations = 0;
};

AdversarialProfileResult adversarial_profile(const Instance& inst, const Mechanism& mech,
                                             AdversarialMode mode = AdversarialMode::pessimistic);

// Exact best response of one agent against fixed strategies of the others:
// maximize expected y, break exact ties toward expected principal utility,
// then by outcome id (abstain last).
Strategy best_response(const Instance& inst, const Mechanism& mech, int agent,
                       const StrategyProfile& others, std::uint64_t cap = kDefaultProfileCap);

struct EquilibriumResult {
  StrategyProfile profile;
  Rational expected_principal;
  std::uint64_t profiles_checked = 0;
  std::uint64_t equilibria_found = 0;
};

// Enumerates pure strategy profiles, keeps those where every agent-type's
// action is a best response (ties toward the principal), and returns one
// maximizing exact expected principal utility.
EquilibriumResult find_principal_best_equilibrium(const Instance& inst, const Mechanism& mech,
                                                  std::uint64_t cap = kDefaultEquilibriumCap);

// The y-value construction that makes adversarial behavior dominant: label
// one agent's outcomes by ascending x and assign y = (P/2)^i, with P the
// probability that all other agents observe only copies of the least
// outcome. Requires a fully-symmetric finite adversarial instance.
Instance build_analogous_strategic(const Instance& adversarial);

// Drops y-values: the adversarial instance analogous to a strategic one.
Instance build_analogous_adversarial(const Instance& strategic);

}  // namespace delsearch
