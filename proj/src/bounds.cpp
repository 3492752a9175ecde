#include "delsearch/bounds.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "delsearch/agents.hpp"

namespace delsearch {

double solve_p(int k) {
  if (k < 1) fail(Errc::config, "DomainError", "solve_p requires k >= 1");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std::pow(mid, k) + mid - 1.0 < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

ThresholdPlan weak_plan(int k, double p, double t, PlanProvenance prov) {
  ThresholdPlan plan;
  plan.p = p;
  plan.t = t;
  plan.agent_modes.assign(static_cast<std::size_t>(k), ThresholdMode::weak);
  plan.provenance = prov;
  return plan;
}

// level: the target value of Pr[max < t] being split (p, or q for shuffled
// plans). Strict mode goes to the lowest-indexed agents; agent symmetry
// makes only the count matter.
std::vector<ThresholdPlan> split_plans(int k, double p, double level, const AtomBlocked& blocked,
                                       double g_below, double g_at_most, PlanProvenance prov) {
  const double phi = (level - g_below) / (g_at_most - g_below);
  std::vector<ThresholdPlan> plans;
  plans.reserve(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    ThresholdPlan plan = weak_plan(k, p, blocked.x_prime, prov);
    for (int i = 0; i < j; ++i) plan.agent_modes[static_cast<std::size_t>(i)] = ThresholdMode::strict;
    plan.has_atom = true;
    plan.atom_x = blocked.x_prime;
    plan.phi = phi;
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace

ThresholdPlan atomless_threshold_plan(const Instance& inst) {
  if (!inst.agent_symmetric())
    fail(Errc::model_violation, "NotAgentSymmetric",
         "the quantile threshold construction needs agent symmetry");
  if (!inst.all_atomless())
    fail(Errc::model_violation, "HasAtoms",
         "instance has atoms; use the atom-split construction");
  const double p = solve_p(inst.k());
  auto q = quantile_max(inst, 1, p);
  const double* t = std::get_if<double>(&q);
  if (t == nullptr)
    fail(Errc::model_violation, "HasAtoms", "quantile blocked by an atom");
  return weak_plan(inst.k(), p, *t, PlanProvenance::atomless);
}

std::vector<ThresholdPlan> atom_split_plan(const Instance& inst) {
  if (!inst.agent_symmetric())
    fail(Errc::model_violation, "NotAgentSymmetric",
         "the quantile threshold construction needs agent symmetry");
  const double p = solve_p(inst.k());
  auto q = quantile_max(inst, 1, p);
  if (const double* t = std::get_if<double>(&q))
    return {weak_plan(inst.k(), p, *t, PlanProvenance::atomless)};
  const AtomBlocked blocked = std::get<AtomBlocked>(q);
  const double g_below = max_cdf(inst, 1, blocked.x_prime, true);
  const double g_at_most = max_cdf(inst, 1, blocked.x_prime, false);
  return split_plans(inst.k(), p, p, blocked, g_below, g_at_most, PlanProvenance::atom_split);
}

std::vector<ThresholdPlan> shuffled_threshold_plans(const Instance& pool, int k) {
  if (pool.elements().empty())
    fail(Errc::model_violation, "EmptyPool", "shuffled plans need a nonempty pool");
  std::vector<int> all(static_cast<std::size_t>(pool.element_count()));
  for (int e = 0; e < pool.element_count(); ++e) all[e] = e;
  const double p = solve_p(k);
  const double q_target = 1.0 - p;
  auto q = quantile_max_over(pool, all, q_target);
  if (const double* t = std::get_if<double>(&q))
    return {weak_plan(k, p, *t, PlanProvenance::shuffled)};
  const AtomBlocked blocked = std::get<AtomBlocked>(q);
  const double g_below = max_cdf_over(pool, all, blocked.x_prime, true);
  const double g_at_most = max_cdf_over(pool, all, blocked.x_prime, false);
  return split_plans(k, p, q_target, blocked, g_below, g_at_most, PlanProvenance::shuffled);
}

ThresholdMechanism plan_mechanism(const ThresholdPlan& plan, const Instance& inst) {
  ThresholdMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.theta.resize(static_cast<std::size_t>(inst.element_count()));
  for (int e = 0; e < inst.element_count(); ++e) {
    const int owner = inst.elements()[static_cast<std::size_t>(e)].owner;
    if (owner < 1)
      fail(Errc::model_violation, "NoOwner", "plan mechanisms need assigned elements");
    mech.theta[static_cast<std::size_t>(e)] = {plan.t,
                                               plan.agent_modes[static_cast<std::size_t>(owner - 1)]};
  }
  return mech;
}

// ---------------------------------------------------------------------------
// Shuffling

Instance with_owners(const Instance& pool, const std::vector<int>& owners, int k) {
  std::vector<Element> elements = pool.elements();
  for (std::size_t e = 0; e < elements.size(); ++e) elements[e].owner = owners[e];
  return Instance(k, pool.flavor(), AssignmentMode::fixed, std::move(elements));
}

Rational pessimistic_exact_utility(const Instance& inst, const Mechanism& mech) {
  auto adv = adversarial_profile(inst, mech, AdversarialMode::pessimistic);
  return expected_principal_factored(inst, mech, adv.profile);
}

Instance assign_shuffled(const Instance& pool, int k, std::uint64_t seed, ShuffleVariant variant) {
  const int n = pool.element_count();
  if (k < 1) fail(Errc::config, "DomainError", "assignment needs k >= 1");
  std::vector<int> owners(static_cast<std::size_t>(n));
  Rng rng(derive_seed(seed, 0));
  if (variant == ShuffleVariant::independent) {
    for (int e = 0; e < n; ++e) owners[e] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  } else {
    if (n % k != 0)
      fail(Errc::model_violation, "IndivisiblePool",
           "balanced assignment needs k dividing the pool size");
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) perm[e] = e;
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[i], perm[j]);
    }
    const int per_agent = n / k;
    for (int i = 0; i < n; ++i) owners[static_cast<std::size_t>(perm[i])] = 1 + i / per_agent;
  }
  std::vector<Element> elements = pool.elements();
  for (int e = 0; e < n; ++e) elements[static_cast<std::size_t>(e)].owner = owners[e];
  return Instance(k, pool.flavor(), AssignmentMode::fixed, std::move(elements));
}

namespace {

void equipartitions(int n, int k, int per_agent, std::vector<int>& owners, int next_agent,
                    std::vector<std::pair<std::vector<int>, Rational>>& out) {
  if (next_agent > k) {
    out.push_back({owners, Rational(0)});
    return;
  }
  // choose per_agent unassigned elements for next_agent, lexicographically
  std::vector<int> unassigned;
  for (int e = 0; e < n; ++e)
    if (owners[static_cast<std::size_t>(e)] == 0) unassigned.push_back(e);
  std::vector<int> pick(static_cast<std::size_t>(per_agent));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == per_agent) {
      for (int e : pick) owners[static_cast<std::size_t>(e)] = next_agent;
      equipartitions(n, k, per_agent, owners, next_agent + 1, out);
      for (int e : pick) owners[static_cast<std::size_t>(e)] = 0;
      return;
    }
    for (int i = start; i < static_cast<int>(unassigned.size()); ++i) {
      pick[static_cast<std::size_t>(depth)] = unassigned[static_cast<std::size_t>(i)];
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

std::vector<std::pair<std::vector<int>, Rational>> enumerate_assignments(const Instance& pool,
                                                                         int k,
                                                                         ShuffleVariant variant,
                                                                         std::uint64_t cap) {
  const int n = pool.element_count();
  std::vector<std::pair<std::vector<int>, Rational>> out;
  if (variant == ShuffleVariant::independent) {
    double count = std::pow(static_cast<double>(k), n);
    if (count > static_cast<double>(cap))
      fail(Errc::cap_exceeded, "CapExceeded", "assignment space exceeds cap");
    std::vector<int> owners(static_cast<std::size_t>(n), 1);
    const Rational w = Rational(1) / pow_rat(Rational(k), static_cast<unsigned>(n));
    while (true) {
      out.push_back({owners, w});
      int pos = n - 1;
      while (pos >= 0 && owners[static_cast<std::size_t>(pos)] == k) {
        owners[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++owners[static_cast<std::size_t>(pos)];
    }
  } else {
    if (k <= 0 || n % k != 0)
      fail(Errc::model_violation, "IndivisiblePool",
           "balanced assignment needs k dividing the pool size");
    std::vector<int> owners(static_cast<std::size_t>(n), 0);
    equipartitions(n, k, n / k, owners, 1, out);
    if (out.size() > cap) fail(Errc::cap_exceeded, "CapExceeded", "assignment space exceeds cap");
    const Rational w = Rational(1) / Rational(static_cast<long>(out.size()));
    for (auto& entry : out) entry.second = w;
  }
  return out;
}

ShuffledEvaluation shuffled_exact_evaluation(const Instance& pool, int k,
                                             const ThresholdPlan& plan, ShuffleVariant variant,
                                             std::uint64_t cap) {
  const auto assignments = enumerate_assignments(pool, k, variant, cap);
  const std::size_t total = assignments.size();
  const std::size_t ranges = std::max<std::size_t>(1, std::min<std::size_t>(total, 64));
  std::vector<Rational> partial(ranges, Rational(0));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(ranges); ++r) {
    const std::size_t first = total * static_cast<std::size_t>(r) / ranges;
    const std::size_t last = total * (static_cast<std::size_t>(r) + 1) / ranges;
    Rational local(0);
    for (std::size_t i = first; i < last; ++i) {
      Instance assigned = with_owners(pool, assignments[i].first, k);
      Mechanism mech = plan_mechanism(plan, assigned);
      local += assignments[i].second * pessimistic_exact_utility(assigned, mech);
    }
    partial[static_cast<std::size_t>(r)] = std::move(local);
  }
  ShuffledEvaluation out;
  out.expected_principal = Rational(0);
  for (const Rational& p : partial) out.expected_principal += p;
  out.expected_opt = expected_opt_exact(pool);
  out.ratio = to_double(out.expected_principal / out.expected_opt);
  out.assignments = total;
  return out;
}

McResult shuffled_mc_evaluation(const Instance& pool, int k, const ThresholdPlan& plan,
                                ShuffleVariant variant, std::uint64_t samples, std::uint64_t seed,
                                Exec exec) {
  const int n = pool.element_count();
  if (variant == ShuffleVariant::balanced && (k < 1 || n % k != 0))
    fail(Errc::model_violation, "IndivisiblePool",
         "balanced assignment needs k dividing the pool size");
  const double t = plan.t;
  return mc_estimate(samples, seed, exec, [&, n, k, t](Rng& rng) {
    thread_local std::vector<int> owner;
    thread_local std::vector<double> proposal;
    owner.assign(static_cast<std::size_t>(n), 0);
    proposal.assign(static_cast<std::size_t>(k), -1.0);
    if (variant == ShuffleVariant::independent) {
      for (int e = 0; e < n; ++e)
        owner[e] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    } else {
      thread_local std::vector<int> perm;
      perm.resize(static_cast<std::size_t>(n));
      for (int e = 0; e < n; ++e) perm[e] = e;
      for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
      }
      const int per_agent = n / k;
      for (int i = 0; i < n; ++i) owner[static_cast<std::size_t>(perm[i])] = 1 + i / per_agent;
    }
    for (int e = 0; e < n; ++e) {
      const double x = pool.elements()[static_cast<std::size_t>(e)].distribution.sample(rng).x;
      const int i = owner[e];
      const bool strict = plan.agent_modes[static_cast<std::size_t>(i - 1)] == ThresholdMode::strict;
      if (strict ? x > t : x >= t) {
        if (proposal[i - 1] < 0.0 || x < proposal[i - 1]) proposal[i - 1] = x;
      }
    }
    double best = 0.0;
    for (int i = 0; i < k; ++i)
      if (proposal[i] >= 0.0) best = std::max(best, proposal[i]);
    return best;
  });
}

// ---------------------------------------------------------------------------
// Hard instance

Instance hard_instance(int k, const Rational& eps) {
  if (k < 2) fail(Errc::config, "DomainError", "hard instances need k >= 2");
  if (!(eps > 0 && eps < 1))
    fail(Errc::config, "DomainError", "hard instances need eps in (0,1)");
  const double x_high = to_double(Rational(1) / eps);
  FiniteSupport support;
  support.atoms.push_back({1.0, std::nullopt, Rational(1) - eps});
  support.atoms.push_back({x_high, std::nullopt, eps});
  std::vector<Element> elements;
  for (int i = 1; i <= k; ++i)
    for (int j = 0; j < 2; ++j)
      elements.push_back(Element{i, OutcomeDistribution(DistributionLaw{support})});
  return Instance(k, Flavor::adversarial, AssignmentMode::fixed, std::move(elements));
}

HardInstanceFormulas hard_instance_formulas(int k, const Rational& eps) {
  if (k < 2) fail(Errc::config, "DomainError", "hard instances need k >= 2");
  HardInstanceFormulas f;
  const Rational om = Rational(1) - eps;  // 1 - eps
  const Rational om_2k = pow_rat(om, static_cast<unsigned>(2 * k));
  const Rational om_2k1 = pow_rat(om, static_cast<unsigned>(2 * k - 1));
  const Rational inv_eps = Rational(1) / eps;
  f.e_a = inv_eps * (Rational(1) - om_2k);
  f.e_b = inv_eps * (Rational(1) - om_2k1) + om_2k1;
  f.e_opt = inv_eps * (Rational(1) - om_2k) + om_2k;
  f.ratio = std::max(f.e_a, f.e_b) / f.e_opt;
  f.limit = Rational(1) - Rational(1) / Rational(2 * k + 1);
  return f;
}

ThresholdMechanism hard_mechanism_a(const Instance& inst, const Rational& eps) {
  ThresholdMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  const double x_high = to_double(Rational(1) / eps);
  mech.theta.assign(static_cast<std::size_t>(inst.element_count()),
                    ThresholdEntry{x_high, ThresholdMode::weak});
  return mech;
}

ThresholdMechanism hard_mechanism_b(const Instance& inst, const Rational& eps) {
  ThresholdMechanism mech = hard_mechanism_a(inst, eps);
  // agent 1's first element accepts both outcomes
  const int first = inst.elements_of(1).front();
  mech.theta[static_cast<std::size_t>(first)] = ThresholdEntry{1.0, ThresholdMode::weak};
  return mech;
}

// ---------------------------------------------------------------------------
// Exhaustive scan

ScanResult exhaustive_mechanism_scan(const Instance& inst, std::uint64_t cap, Exec exec) {
  if (!inst.all_finite())
    fail(Errc::model_violation, "NotFinite", "the scan enumerates finite acceptance sets");
  const int n = inst.element_count();
  std::vector<std::uint64_t> choices(static_cast<std::size_t>(n));
  std::uint64_t total = 1;
  for (int e = 0; e < n; ++e) {
    const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
    if (fs->atoms.size() > 2)
      fail(Errc::cap_exceeded, "CapExceeded",
           "per-element acceptance choices exceed 4 (supports of more than 2 outcomes)");
    choices[static_cast<std::size_t>(e)] = 1ull << fs->atoms.size();
    if (total > cap / choices[static_cast<std::size_t>(e)] + 1)
      fail(Errc::cap_exceeded, "CapExceeded", "mechanism space exceeds cap");
    total *= choices[static_cast<std::size_t>(e)];
    if (total > cap) fail(Errc::cap_exceeded, "CapExceeded", "mechanism space exceeds cap");
  }

  const TieOrder tie = TieOrder::default_order(inst);
  auto build = [&](std::uint64_t index) {
    SingleProposalMechanism mech;
    mech.tie = tie;
    mech.accept.resize(static_cast<std::size_t>(n));
    for (int e = n - 1; e >= 0; --e) {
      const std::uint64_t c = choices[static_cast<std::size_t>(e)];
      const std::uint64_t mask = index % c;
      index /= c;
      const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
      std::vector<char> atoms(fs->atoms.size(), 0);
      for (std::size_t a = 0; a < fs->atoms.size(); ++a) atoms[a] = (mask >> a) & 1 ? 1 : 0;
      mech.accept[static_cast<std::size_t>(e)] = AcceptanceSet::outcomes(std::move(atoms));
    }
    return mech;
  };

  auto evaluate = [&](std::uint64_t index) {
    Mechanism mech = build(index);
    auto adv = adversarial_profile(inst, mech, AdversarialMode::pessimistic);
    return expected_principal_factored(inst, mech, adv.profile);
  };

  const std::uint64_t ranges = std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 64));
  std::vector<Rational> best_val(ranges, Rational(-1));
  std::vector<std::uint64_t> best_idx(ranges, 0);
  std::vector<std::uint64_t> ties(ranges, 0);

  auto run_range = [&](std::uint64_t r) {
    const std::uint64_t first = total * r / ranges;
    const std::uint64_t last = total * (r + 1) / ranges;
    Rational bv(-1);
    std::uint64_t bi = 0, tie_count = 0;
    for (std::uint64_t i = first; i < last; ++i) {
      Rational v = evaluate(i);
      if (v > bv) {
        bv = v;
        bi = i;
        tie_count = 1;
      } else if (v == bv) {
        ++tie_count;
      }
    }
    best_val[r] = std::move(bv);
    best_idx[r] = bi;
    ties[r] = tie_count;
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(ranges); ++r)
      run_range(static_cast<std::uint64_t>(r));
  } else {
    for (std::uint64_t r = 0; r < ranges; ++r) run_range(r);
  }

  ScanResult result;
  result.mechanism_count = total;
  Rational bv(-1);
  std::uint64_t bi = 0, tie_count = 0;
  for (std::uint64_t r = 0; r < ranges; ++r) {
    if (best_val[r] > bv) {
      bv = best_val[r];
      bi = best_idx[r];
      tie_count = ties[r];
    } else if (best_val[r] == bv) {
      tie_count += ties[r];
    }
  }
  result.best_utility = bv;
  result.best_index = bi;
  result.argmax_count = tie_count;
  result.best = build(bi);
  return result;
}

// ---------------------------------------------------------------------------
// Asymptotics

AsymptoticsRecord asymptotic_check(int k) {
  if (k < 2) fail(Errc::config, "DomainError", "asymptotic_check requires k >= 2");
  AsymptoticsRecord rec;
  rec.k = k;
  const double lk = std::log(static_cast<double>(k));
  rec.r_minus = 1.0 + lk;
  rec.r_plus = 0.5 * (lk - std::log(lk));
  auto g = [&](double r) {
    return std::pow(1.0 - r / static_cast<double>(k), k) - r / static_cast<double>(k);
  };
  rec.g_minus = g(rec.r_minus);
  rec.g_plus = g(rec.r_plus);
  rec.p = solve_p(k);
  rec.lower = 1.0 - rec.r_minus / static_cast<double>(k);
  rec.upper = 1.0 - rec.r_plus / static_cast<double>(k);
  rec.bracket_ok = rec.g_minus < 0.0 && rec.g_plus > 0.0;
  rec.p_inside = rec.lower < rec.p && rec.p < rec.upper;
  return rec;
}

}  // namespace delsearch
