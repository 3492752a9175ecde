#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "delsearch/errors.hpp"
#include "delsearch/rational.hpp"
#include "delsearch/rng.hpp"

namespace delsearch {

inline constexpr std::uint64_t kDefaultProfileCap = 1'000'000;

enum class Flavor { strategic, adversarial };
enum class AssignmentMode { fixed, shuffled };

// ---------------------------------------------------------------------------
// Distributions

struct FiniteAtom {
  double x = 0.0;
  std::optional<double> y;
  Rational mass;  // positive, atoms sum to 1
};

struct FiniteSupport {
  std::vector<FiniteAtom> atoms;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Exponential {
  double rate = 1.0;
};

// Continuous CDF through breakpoints (x_i, F_i), linear in between,
// F strictly increasing from 0 to 1.
struct PiecewiseLinearCdf {
  std::vector<std::pair<double, double>> points;
};

using DistributionLaw = std::variant<FiniteSupport, Uniform, Exponential, PiecewiseLinearCdf>;

class OutcomeDistribution {
 public:
  OutcomeDistribution() : law_(FiniteSupport{}) {}
  explicit OutcomeDistribution(DistributionLaw law);

  const DistributionLaw& law() const { return law_; }
  bool is_finite() const { return std::holds_alternative<FiniteSupport>(law_); }
  const FiniteSupport* finite() const { return std::get_if<FiniteSupport>(&law_); }

  // Pr[X < v] (strict) or Pr[X <= v].
  double cdf(double v, bool strict) const;
  Rational cdf_exact(double v, bool strict) const;  // finite laws only

  // Inverse CDF for atomless laws, p in (0,1).
  double quantile(double p) const;

  struct Draw {
    int atom = -1;  // support index for finite laws
    double x = 0.0;
  };
  Draw sample(Rng& rng) const;

  double min_support() const;
  double max_support() const;  // +inf for Exponential

 private:
  DistributionLaw law_;
  std::vector<double> cum_;  // finite laws: cumulative masses as doubles
};

// ---------------------------------------------------------------------------
// Instance

struct Element {
  int owner = 0;  // agent index 1..k; 0 marks an unassigned pool element
  OutcomeDistribution distribution;
};

struct Outcome {
  int element = -1;  // index into Instance::elements()
  int atom = -1;     // support index, -1 for sampled atomless values
  double x = 0.0;
  std::optional<double> y;
};

// Outcome identity: element plus support index (atomless: realized value).
inline bool same_outcome(const Outcome& a, const Outcome& b) {
  if (a.element != b.element) return false;
  if (a.atom >= 0 || b.atom >= 0) return a.atom == b.atom;
  return a.x == b.x;
}

struct TypeProfile {
  std::vector<Outcome> outcomes;  // one per element, in instance order
};

class Instance {
 public:
  Instance(int k, Flavor flavor, AssignmentMode mode, std::vector<Element> elements);

  int k() const { return k_; }
  Flavor flavor() const { return flavor_; }
  AssignmentMode assignment_mode() const { return mode_; }
  const std::vector<Element>& elements() const { return elements_; }
  int element_count() const { return static_cast<int>(elements_.size()); }

  // Elements owned by `agent` (1..k), in instance order. elements_of(0)
  // lists unassigned pool elements.
  const std::vector<int>& elements_of(int agent) const;
  // Position of an element within its owner's list.
  int owner_position(int element) const { return owner_pos_[element]; }

  std::string element_id(int element) const;
  std::string outcome_id(const Outcome& o) const;
  int element_by_id(const std::string& id) const;  // -1 when unknown

  Outcome outcome_at(int element, int atom) const;

  bool all_finite() const;
  bool all_atomless() const;
  bool agent_symmetric() const;
  bool fully_symmetric() const;

  // Joint type-space size, saturating at cap+1.
  std::uint64_t joint_profile_count(std::uint64_t cap) const;

 private:
  int k_;
  Flavor flavor_;
  AssignmentMode mode_;
  std::vector<Element> elements_;
  std::vector<std::vector<int>> by_agent_;  // [0..k]
  std::vector<int> owner_pos_;
};

struct ValidationResult {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

ValidationResult validate_instance(const Instance& inst);

// ---------------------------------------------------------------------------
// Type-profile enumeration and sampling (finite supports)

// Exhaustive product law; masses sum to exactly 1.
std::vector<std::pair<TypeProfile, Rational>> enumerate_type_profiles(
    const Instance& inst, std::uint64_t cap = kDefaultProfileCap);

// Low-overhead visitation in lexicographic order (element 0 most
// significant). `atoms` holds one support index per element.
void for_each_type_profile(const Instance& inst, std::uint64_t cap,
                           const std::function<void(std::span<const int>, const Rational&)>& visit);

// Random access used by the range-parallel evaluators.
std::uint64_t profile_count_checked(const Instance& inst, std::uint64_t cap);
void profile_from_index(const Instance& inst, std::uint64_t index, std::vector<int>& atoms);
bool next_profile(const Instance& inst, std::vector<int>& atoms);
Rational profile_mass(const Instance& inst, std::span<const int> atoms);

TypeProfile sample_type_profile(const Instance& inst, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Per-agent maximum: CDF and quantile

// Pr[max over the agent's elements < v] (strict) or <= v.
double max_cdf(const Instance& inst, int agent, double v, bool strict);
Rational max_cdf_exact(const Instance& inst, int agent, double v, bool strict);

// Same over an explicit element subset (used by the shuffled constructions).
double max_cdf_over(const Instance& inst, std::span<const int> elems, double v, bool strict);
Rational max_cdf_exact_over(const Instance& inst, std::span<const int> elems, double v, bool strict);

struct AtomBlocked {
  double x_prime;  // Pr[max < x'] < p <= Pr[max <= x']
};

// Threshold t with Pr[max < t] = p when one exists; otherwise the blocking
// atom (the case the atom-split plans handle). p in (0,1).
std::variant<double, AtomBlocked> quantile_max(const Instance& inst, int agent, double p);
std::variant<double, AtomBlocked> quantile_max_over(const Instance& inst,
                                                    std::span<const int> elems, double p);

}  // namespace delsearch
