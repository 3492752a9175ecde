#include "delsearch/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace delsearch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void not_finite(const char* where) {
  fail(Errc::model_violation, "NotFinite", std::string(where) + " requires finite supports");
}

}  // namespace

// ---------------------------------------------------------------------------
// OutcomeDistribution

OutcomeDistribution::OutcomeDistribution(DistributionLaw law) : law_(std::move(law)) {
  if (const auto* fs = std::get_if<FiniteSupport>(&law_)) {
    cum_.reserve(fs->atoms.size());
    Rational acc(0);
    for (const auto& a : fs->atoms) {
      acc += a.mass;
      cum_.push_back(to_double(acc));
    }
    if (!cum_.empty()) cum_.back() = 1.0;
  }
}

double OutcomeDistribution::cdf(double v, bool strict) const {
  if (is_finite()) return to_double(cdf_exact(v, strict));
  if (const auto* u = std::get_if<Uniform>(&law_)) {
    if (strict ? v <= u->lo : v < u->lo) return 0.0;
    if (v >= u->hi) return 1.0;
    return (v - u->lo) / (u->hi - u->lo);
  }
  if (const auto* e = std::get_if<Exponential>(&law_)) {
    if (strict ? v <= 0.0 : v < 0.0) return 0.0;
    return -std::expm1(-e->rate * v);
  }
  const auto& pts = std::get<PiecewiseLinearCdf>(law_).points;
  if (strict ? v <= pts.front().first : v < pts.front().first) return 0.0;
  if (v >= pts.back().first) return 1.0;
  auto it = std::upper_bound(pts.begin(), pts.end(), v,
                             [](double a, const std::pair<double, double>& b) { return a < b.first; });
  const auto& [x1, f1] = *it;
  const auto& [x0, f0] = *(it - 1);
  return f0 + (f1 - f0) * (v - x0) / (x1 - x0);
}

Rational OutcomeDistribution::cdf_exact(double v, bool strict) const {
  const auto* fs = finite();
  if (fs == nullptr) not_finite("cdf_exact");
  Rational acc(0);
  for (const auto& a : fs->atoms) {
    if (strict ? a.x < v : a.x <= v) acc += a.mass;
  }
  return acc;
}

double OutcomeDistribution::quantile(double p) const {
  if (const auto* u = std::get_if<Uniform>(&law_)) return u->lo + p * (u->hi - u->lo);
  if (const auto* e = std::get_if<Exponential>(&law_)) return -std::log1p(-p) / e->rate;
  if (const auto* pl = std::get_if<PiecewiseLinearCdf>(&law_)) {
    const auto& pts = pl->points;
    auto it = std::lower_bound(pts.begin(), pts.end(), p,
                               [](const std::pair<double, double>& a, double b) { return a.second < b; });
    if (it == pts.begin()) return pts.front().first;
    if (it == pts.end()) return pts.back().first;
    const auto& [x1, f1] = *it;
    const auto& [x0, f0] = *(it - 1);
    if (f1 == f0) return x0;
    return x0 + (x1 - x0) * (p - f0) / (f1 - f0);
  }
  fail(Errc::model_violation, "HasAtoms", "quantile is defined for atomless laws only");
}

OutcomeDistribution::Draw OutcomeDistribution::sample(Rng& rng) const {
  if (const auto* fs = finite()) {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    int idx = static_cast<int>(it - cum_.begin());
    if (idx >= static_cast<int>(fs->atoms.size())) idx = static_cast<int>(fs->atoms.size()) - 1;
    return {idx, fs->atoms[idx].x};
  }
  return {-1, quantile(rng.uniform01())};
}

double OutcomeDistribution::min_support() const {
  if (const auto* fs = finite()) {
    double lo = kInf;
    for (const auto& a : fs->atoms) lo = std::min(lo, a.x);
    return lo;
  }
  if (const auto* u = std::get_if<Uniform>(&law_)) return u->lo;
  if (std::holds_alternative<Exponential>(law_)) return 0.0;
  return std::get<PiecewiseLinearCdf>(law_).points.front().first;
}

double OutcomeDistribution::max_support() const {
  if (const auto* fs = finite()) {
    double hi = -kInf;
    for (const auto& a : fs->atoms) hi = std::max(hi, a.x);
    return hi;
  }
  if (const auto* u = std::get_if<Uniform>(&law_)) return u->hi;
  if (std::holds_alternative<Exponential>(law_)) return kInf;
  return std::get<PiecewiseLinearCdf>(law_).points.back().first;
}

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(int k, Flavor flavor, AssignmentMode mode, std::vector<Element> elements)
    : k_(k), flavor_(flavor), mode_(mode), elements_(std::move(elements)) {
  if (k_ < 1) fail(Errc::model_violation, "BadAgentCount", "k must be >= 1");
  by_agent_.assign(static_cast<std::size_t>(k_) + 1, {});
  owner_pos_.assign(elements_.size(), 0);
  for (int e = 0; e < element_count(); ++e) {
    int owner = elements_[e].owner;
    if (owner < 0 || owner > k_)
      fail(Errc::model_violation, "BadOwner", "element owner out of range: " + std::to_string(owner));
    owner_pos_[e] = static_cast<int>(by_agent_[owner].size());
    by_agent_[owner].push_back(e);
  }
}

const std::vector<int>& Instance::elements_of(int agent) const {
  if (agent < 0 || agent > k_)
    fail(Errc::model_violation, "BadAgent", "agent index out of range: " + std::to_string(agent));
  return by_agent_[agent];
}

std::string Instance::element_id(int element) const {
  const Element& e = elements_[element];
  return "e" + std::to_string(e.owner) + "." + std::to_string(owner_pos_[element] + 1);
}

std::string Instance::outcome_id(const Outcome& o) const {
  std::ostringstream os;
  os << element_id(o.element) << ".";
  if (o.atom >= 0)
    os << (o.atom + 1);
  else
    os << "v" << o.x;
  return os.str();
}

int Instance::element_by_id(const std::string& id) const {
  for (int e = 0; e < element_count(); ++e)
    if (element_id(e) == id) return e;
  return -1;
}

Outcome Instance::outcome_at(int element, int atom) const {
  const auto* fs = elements_[element].distribution.finite();
  if (fs == nullptr) not_finite("outcome_at");
  const FiniteAtom& a = fs->atoms[static_cast<std::size_t>(atom)];
  return Outcome{element, atom, a.x, a.y};
}

bool Instance::all_finite() const {
  return std::all_of(elements_.begin(), elements_.end(),
                     [](const Element& e) { return e.distribution.is_finite(); });
}

bool Instance::all_atomless() const {
  return std::none_of(elements_.begin(), elements_.end(),
                      [](const Element& e) { return e.distribution.is_finite(); });
}

namespace {

// Canonical fingerprint of a law for symmetry comparisons: finite supports
// as sorted (x, mass) lists, atomless laws by their parameters.
struct LawKey {
  int kind;
  std::vector<std::pair<double, Rational>> atoms;  // unused for atomless
  std::vector<double> params;

  bool operator<(const LawKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (params != o.params) return params < o.params;
    return atoms < o.atoms;
  }
  bool operator==(const LawKey& o) const {
    return kind == o.kind && params == o.params && atoms == o.atoms;
  }
};

LawKey law_key(const OutcomeDistribution& d) {
  LawKey key{};
  if (const auto* fs = d.finite()) {
    key.kind = 0;
    for (const auto& a : fs->atoms) key.atoms.push_back({a.x, a.mass});
    std::sort(key.atoms.begin(), key.atoms.end());
  } else if (const auto* u = std::get_if<Uniform>(&d.law())) {
    key.kind = 1;
    key.params = {u->lo, u->hi};
  } else if (const auto* e = std::get_if<Exponential>(&d.law())) {
    key.kind = 2;
    key.params = {e->rate};
  } else {
    key.kind = 3;
    for (const auto& [x, f] : std::get<PiecewiseLinearCdf>(d.law()).points) {
      key.params.push_back(x);
      key.params.push_back(f);
    }
  }
  return key;
}

}  // namespace

bool Instance::agent_symmetric() const {
  if (k_ < 2) return true;
  std::vector<std::vector<LawKey>> per_agent(static_cast<std::size_t>(k_));
  for (int i = 1; i <= k_; ++i) {
    for (int e : elements_of(i)) per_agent[i - 1].push_back(law_key(elements_[e].distribution));
    std::sort(per_agent[i - 1].begin(), per_agent[i - 1].end());
  }
  for (int i = 1; i < k_; ++i)
    if (!(per_agent[0] == per_agent[i])) return false;
  return true;
}

bool Instance::fully_symmetric() const {
  if (elements_.empty()) return true;
  // Every agent owns the same number of elements and all laws are identical.
  std::size_t m = elements_of(1).size();
  for (int i = 2; i <= k_; ++i)
    if (elements_of(i).size() != m) return false;
  if (!by_agent_[0].empty()) return false;
  LawKey first = law_key(elements_[0].distribution);
  for (const Element& e : elements_)
    if (!(law_key(e.distribution) == first)) return false;
  return true;
}

std::uint64_t Instance::joint_profile_count(std::uint64_t cap) const {
  std::uint64_t total = 1;
  for (const Element& e : elements_) {
    const auto* fs = e.distribution.finite();
    std::uint64_t s = fs ? fs->atoms.size() : cap + 1;
    if (s == 0) return 0;
    if (total > (cap + 1) / s + 1) return cap + 1;
    total *= s;
    if (total > cap) return cap + 1;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Validation

ValidationResult validate_instance(const Instance& inst) {
  ValidationResult r;
  auto note = [&](const std::string& msg) { r.issues.push_back(msg); };

  for (int e = 0; e < inst.element_count(); ++e) {
    const Element& el = inst.elements()[e];
    const std::string eid = inst.element_id(e);
    if (el.owner == 0 && inst.assignment_mode() == AssignmentMode::fixed)
      note("element " + eid + " has no owner in fixed assignment mode");
    if (const auto* fs = el.distribution.finite()) {
      if (fs->atoms.empty()) note("element " + eid + " has empty support");
      Rational total(0);
      for (std::size_t a = 0; a < fs->atoms.size(); ++a) {
        const FiniteAtom& atom = fs->atoms[a];
        if (atom.mass <= 0) note("element " + eid + " atom " + std::to_string(a + 1) + " has nonpositive mass");
        if (atom.x < 0) note("element " + eid + " atom " + std::to_string(a + 1) + " has negative x");
        if (atom.y && *atom.y < 0)
          note("element " + eid + " atom " + std::to_string(a + 1) + " has negative y");
        if (inst.flavor() == Flavor::adversarial && atom.y)
          note("y present in adversarial flavor (element " + eid + ")");
        if (inst.flavor() == Flavor::strategic && !atom.y)
          note("y missing in strategic flavor (element " + eid + ")");
        total += atom.mass;
      }
      if (total != 1)
        note("element " + eid + " support mass " + rational_string(total) + " != 1");
    } else if (const auto* u = std::get_if<Uniform>(&el.distribution.law())) {
      if (!(u->lo < u->hi)) note("element " + eid + " uniform needs lo < hi");
      if (u->lo < 0) note("element " + eid + " uniform has negative support");
    } else if (const auto* ex = std::get_if<Exponential>(&el.distribution.law())) {
      if (!(ex->rate > 0)) note("element " + eid + " exponential needs rate > 0");
    } else {
      const auto& pts = std::get<PiecewiseLinearCdf>(el.distribution.law()).points;
      if (pts.size() < 2) note("element " + eid + " piecewise CDF needs >= 2 points");
      if (!pts.empty() && (pts.front().second != 0.0 || pts.back().second != 1.0))
        note("element " + eid + " piecewise CDF must run from 0 to 1");
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i - 1].first < pts[i].first) || !(pts[i - 1].second < pts[i].second)) {
          note("element " + eid + " piecewise CDF must be strictly increasing");
          break;
        }
      }
      if (!pts.empty() && pts.front().first < 0) note("element " + eid + " piecewise CDF has negative support");
    }
  }
  // Outcome ids are derived from (owner, position, atom), so they collide
  // only if two elements share an owner slot; that cannot happen by
  // construction. Still check for duplicate ids defensively via the string
  // form in case of future construction changes.
  std::set<std::string> seen;
  for (int e = 0; e < inst.element_count(); ++e) {
    if (!seen.insert(inst.element_id(e)).second)
      note("duplicate element id " + inst.element_id(e));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Enumeration

std::uint64_t profile_count_checked(const Instance& inst, std::uint64_t cap) {
  if (!inst.all_finite()) not_finite("type-profile enumeration");
  std::uint64_t n = inst.joint_profile_count(cap);
  if (n > cap)
    fail(Errc::cap_exceeded, "CapExceeded",
         "joint type space exceeds cap of " + std::to_string(cap) + " profiles");
  return n;
}

void profile_from_index(const Instance& inst, std::uint64_t index, std::vector<int>& atoms) {
  const int n = inst.element_count();
  atoms.assign(static_cast<std::size_t>(n), 0);
  for (int e = n - 1; e >= 0; --e) {
    const auto* fs = inst.elements()[e].distribution.finite();
    const std::uint64_t s = fs->atoms.size();
    atoms[e] = static_cast<int>(index % s);
    index /= s;
  }
}

bool next_profile(const Instance& inst, std::vector<int>& atoms) {
  for (int e = inst.element_count() - 1; e >= 0; --e) {
    const auto* fs = inst.elements()[e].distribution.finite();
    if (++atoms[e] < static_cast<int>(fs->atoms.size())) return true;
    atoms[e] = 0;
  }
  return false;
}

Rational profile_mass(const Instance& inst, std::span<const int> atoms) {
  Rational mass(1);
  for (int e = 0; e < inst.element_count(); ++e)
    mass *= inst.elements()[e].distribution.finite()->atoms[static_cast<std::size_t>(atoms[e])].mass;
  return mass;
}

void for_each_type_profile(const Instance& inst, std::uint64_t cap,
                           const std::function<void(std::span<const int>, const Rational&)>& visit) {
  const std::uint64_t n = profile_count_checked(inst, cap);
  if (n == 0) return;
  std::vector<int> atoms(static_cast<std::size_t>(inst.element_count()), 0);
  do {
    visit(atoms, profile_mass(inst, atoms));
  } while (next_profile(inst, atoms));
}

std::vector<std::pair<TypeProfile, Rational>> enumerate_type_profiles(const Instance& inst,
                                                                      std::uint64_t cap) {
  std::vector<std::pair<TypeProfile, Rational>> out;
  out.reserve(static_cast<std::size_t>(profile_count_checked(inst, cap)));
  for_each_type_profile(inst, cap, [&](std::span<const int> atoms, const Rational& mass) {
    TypeProfile tp;
    tp.outcomes.reserve(atoms.size());
    for (int e = 0; e < inst.element_count(); ++e) tp.outcomes.push_back(inst.outcome_at(e, atoms[e]));
    out.emplace_back(std::move(tp), mass);
  });
  return out;
}

TypeProfile sample_type_profile(const Instance& inst, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  TypeProfile tp;
  tp.outcomes.reserve(static_cast<std::size_t>(inst.element_count()));
  for (int e = 0; e < inst.element_count(); ++e) {
    auto draw = inst.elements()[e].distribution.sample(rng);
    if (draw.atom >= 0) {
      tp.outcomes.push_back(inst.outcome_at(e, draw.atom));
    } else {
      tp.outcomes.push_back(Outcome{e, -1, draw.x, std::nullopt});
    }
  }
  return tp;
}

// ---------------------------------------------------------------------------
// Max CDF / quantile

double max_cdf_over(const Instance& inst, std::span<const int> elems, double v, bool strict) {
  if (elems.empty()) fail(Errc::model_violation, "NoElements", "empty element set");
  double prod = 1.0;
  for (int e : elems) prod *= inst.elements()[e].distribution.cdf(v, strict);
  return prod;
}

Rational max_cdf_exact_over(const Instance& inst, std::span<const int> elems, double v, bool strict) {
  if (elems.empty()) fail(Errc::model_violation, "NoElements", "empty element set");
  Rational prod(1);
  for (int e : elems) prod *= inst.elements()[e].distribution.cdf_exact(v, strict);
  return prod;
}

double max_cdf(const Instance& inst, int agent, double v, bool strict) {
  const auto& elems = inst.elements_of(agent);
  if (elems.empty()) fail(Errc::model_violation, "NoElements", "agent owns no elements");
  return max_cdf_over(inst, elems, v, strict);
}

Rational max_cdf_exact(const Instance& inst, int agent, double v, bool strict) {
  const auto& elems = inst.elements_of(agent);
  if (elems.empty()) fail(Errc::model_violation, "NoElements", "agent owns no elements");
  return max_cdf_exact_over(inst, elems, v, strict);
}

namespace {

bool subset_all_finite(const Instance& inst, std::span<const int> elems) {
  return std::all_of(elems.begin(), elems.end(),
                     [&](int e) { return inst.elements()[e].distribution.is_finite(); });
}

// Finite case: Pr[max < v] is a left-continuous step function; an exact
// solution exists iff p equals one of its levels.
std::variant<double, AtomBlocked> quantile_finite(const Instance& inst, std::span<const int> elems,
                                                  double p) {
  std::set<double> values;
  for (int e : elems)
    for (const auto& a : inst.elements()[e].distribution.finite()->atoms) values.insert(a.x);
  const Rational pr = rat_from_double(p);
  for (double v : values) {
    Rational lt = max_cdf_exact_over(inst, elems, v, true);
    if (lt == pr) return v;  // smallest support value with Pr[max < v] = p
    Rational le = max_cdf_exact_over(inst, elems, v, false);
    // When p equals Pr[max <= v], the next support value solves exactly and
    // the next iteration returns it; a value strictly inside the jump blocks.
    if (lt < pr && pr < le) return AtomBlocked{v};
  }
  return AtomBlocked{*values.rbegin()};
}

std::variant<double, AtomBlocked> quantile_general(const Instance& inst, std::span<const int> elems,
                                                   double p) {
  // Atom values of the per-subset maximum are atoms of the finite factors.
  std::set<double> atom_values;
  double lo = kInf, hi = -kInf;
  bool unbounded = false;
  for (int e : elems) {
    const auto& d = inst.elements()[e].distribution;
    if (const auto* fs = d.finite())
      for (const auto& a : fs->atoms) atom_values.insert(a.x);
    lo = std::min(lo, d.min_support());
    double ms = d.max_support();
    if (std::isinf(ms))
      unbounded = true;
    else
      hi = std::max(hi, ms);
  }
  for (double a : atom_values) {
    double lt = max_cdf_over(inst, elems, a, true);
    double le = max_cdf_over(inst, elems, a, false);
    if (lt == p) return a;
    if (lt < p && p <= le) return AtomBlocked{a};
  }
  // Continuous stretch: bisect Pr[max < t] = p.
  double a = lo;
  double b;
  if (unbounded) {
    b = std::max(lo, 1.0);
    while (max_cdf_over(inst, elems, b, true) < p) b = b * 2 + 1;
  } else {
    b = hi;
  }
  for (int it = 0; it < 200 && b - a > 0; ++it) {
    double mid = 0.5 * (a + b);
    if (max_cdf_over(inst, elems, mid, true) < p)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::variant<double, AtomBlocked> quantile_max_over(const Instance& inst,
                                                    std::span<const int> elems, double p) {
  if (elems.empty()) fail(Errc::model_violation, "NoElements", "empty element set");
  if (!(p > 0.0 && p < 1.0))
    fail(Errc::model_violation, "BadProbability", "quantile requires 0 < p < 1");
  if (subset_all_finite(inst, elems)) return quantile_finite(inst, elems, p);
  return quantile_general(inst, elems, p);
}

std::variant<double, AtomBlocked> quantile_max(const Instance& inst, int agent, double p) {
  const auto& elems = inst.elements_of(agent);
  if (elems.empty()) fail(Errc::model_violation, "NoElements", "agent owns no elements");
  return quantile_max_over(inst, elems, p);
}

}  // namespace delsearch
