#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "delsearch/model.hpp"

namespace delsearch {

enum class ThresholdMode { weak, strict };

// Deterministic tie-breaking total order over elements.
struct TieOrder {
  std::vector<int> order;  // element indices, best (earliest) first
  std::vector<int> rank;   // rank[element] = position in `order`

  static TieOrder from_order(std::vector<int> order);
  // Lexicographic by (agent index, element index within the agent).
  static TieOrder default_order(const Instance& inst);
};

struct ThresholdEntry {
  double value = 0.0;
  ThresholdMode mode = ThresholdMode::weak;
};

struct ThresholdMechanism {
  std::vector<ThresholdEntry> theta;  // one entry per element
  TieOrder tie;
};

// Per-element acceptable outcomes: the agent-level set R_i is the union over
// the agent's elements.
struct AcceptanceSet {
  bool extensional = false;
  std::vector<char> atoms;  // finite laws: accepted support indices
  double min_x = 0.0;       // interval predicate otherwise
  bool strict = false;

  static AcceptanceSet interval(double min_x, bool strict) {
    AcceptanceSet s;
    s.min_x = min_x;
    s.strict = strict;
    return s;
  }
  static AcceptanceSet outcomes(std::vector<char> mask) {
    AcceptanceSet s;
    s.extensional = true;
    s.atoms = std::move(mask);
    return s;
  }
};

struct SingleProposalMechanism {
  std::vector<AcceptanceSet> accept;  // one per element
  TieOrder tie;
};

// Monotone nondecreasing map given by breakpoints, clamped at the ends.
// Virtual values may be negative.
struct PiecewiseLinearFn {
  std::vector<std::pair<double, double>> points;  // (x, value), x ascending
  double operator()(double x) const;
};

struct MyersonMechanism {
  std::vector<PiecewiseLinearFn> phi;  // one per element
  TieOrder tie;
};

using Mechanism = std::variant<ThresholdMechanism, SingleProposalMechanism, MyersonMechanism>;

const TieOrder& tie_order(const Mechanism& mech);

bool acceptable(const ThresholdMechanism& mech, const Instance& inst, const Outcome& o);
bool acceptable(const SingleProposalMechanism& mech, const Instance& inst, const Outcome& o);
// Myerson mechanisms have no acceptance sets; passing one is an error.
bool acceptable(const Mechanism& mech, const Instance& inst, const Outcome& o);

struct Proposal {
  int agent = 0;
  Outcome claimed;  // claimed.element identifies the proposed element
};

// Accepts the acceptable proposal with maximal x (ties by tie order), then
// rejects everything if the winner's claim disagrees with the truth. Agents
// without a proposal abstain; at most one proposal per agent.
std::optional<Outcome> allocate_single_proposal(const Mechanism& mech, const Instance& inst,
                                                std::span<const Proposal> proposals,
                                                const TypeProfile& truth);

// Direct-revelation allocation from reported types, with the same lie check
// against the truth profile.
std::optional<Outcome> allocate_myerson(const MyersonMechanism& mech, const Instance& inst,
                                        const TypeProfile& reported, const TypeProfile& truth);

SingleProposalMechanism threshold_as_single_proposal(const ThresholdMechanism& mech,
                                                     const Instance& inst);

bool element_symmetric(const ThresholdMechanism& mech, const Instance& inst);
bool agent_symmetric(const ThresholdMechanism& mech, const Instance& inst);
bool fully_symmetric(const ThresholdMechanism& mech, const Instance& inst);

}  // namespace delsearch
