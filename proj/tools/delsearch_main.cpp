// delsearch: delegated-search mechanisms, agent models, and bound
// verification from the command line. One subcommand per construction.

#include <CLI11.hpp>

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "delsearch/agents.hpp"
#include "delsearch/bounds.hpp"
#include "delsearch/engine.hpp"
#include "delsearch/io.hpp"

namespace fs = std::filesystem;
using namespace delsearch;

namespace {

fs::path resolve_out(const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("DELSEARCH_OUT_DIR")) return fs::path(dir) / p;
  return p;
}

void write_report(const std::string& out, const Json& config, const Json& results) {
  if (out.empty()) return;
  Json report;
  report["config"] = config;
  report["results"] = results;
  write_text(resolve_out(out), report.dump(2) + "\n");
}

void append_csv(const std::string& out, const std::string& header, const std::string& row) {
  if (out.empty()) return;
  write_text(resolve_out(out), header + "\n" + row + "\n");
}

Rational parse_eps(const std::string& text) {
  auto eps = parse_rational(text);
  if (!eps || !(*eps > 0) || !(*eps < 1))
    fail(Errc::config, "BadEpsilon", "--eps must be a rational in (0,1), e.g. 1/10");
  return *eps;
}

EvalMode parse_mode(const std::string& mode) {
  if (mode == "exact") return EvalMode::exact;
  if (mode == "mc") return EvalMode::mc;
  fail(Errc::config, "BadMode", "--mode must be exact or mc");
}

struct EvalOptions {
  std::string instance_path;
  std::string mechanism_path;
  std::string mode = "exact";
  std::string behavior = "auto";
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t profile_cap = kDefaultProfileCap;
  std::uint64_t equilibrium_cap = kDefaultEquilibriumCap;
  std::string out;
  std::string csv;
};

Json eval_config(const EvalOptions& opt, const char* command) {
  Json config;
  config["command"] = command;
  config["instance"] = opt.instance_path;
  if (!opt.mechanism_path.empty()) config["mechanism"] = opt.mechanism_path;
  config["mode"] = opt.mode;
  if (opt.behavior != "auto") config["behavior"] = opt.behavior;
  if (opt.mode == "mc") {
    config["samples"] = opt.samples;
    config["seed"] = opt.seed;
  }
  config["profile_cap"] = opt.profile_cap;
  return config;
}

int cmd_eval(const EvalOptions& opt) {
  Instance inst = load_instance(opt.instance_path);
  auto validation = validate_instance(inst);
  if (!validation.ok())
    fail(Errc::model_violation, "InvalidInstance", validation.issues.front());
  Mechanism mech = load_mechanism(opt.mechanism_path, inst);
  const EvalMode mode = parse_mode(opt.mode);

  std::string behavior = opt.behavior;
  if (behavior == "auto")
    behavior = inst.flavor() == Flavor::adversarial ? "pessimistic" : "equilibrium";

  EvaluationReport report;
  if (std::holds_alternative<MyersonMechanism>(mech)) {
    // direct revelation: truthful reporting is dominant
    StrategyProfile unused = empty_profile(inst);
    report = delegation_ratio(inst, mech, unused, mode, opt.samples, opt.seed, Exec::parallel,
                              opt.profile_cap);
  } else if (behavior == "pessimistic" || behavior == "constrained") {
    if (inst.flavor() != Flavor::adversarial)
      fail(Errc::config, "BadBehavior", "adversarial behaviors need an adversarial instance");
    if (mode == EvalMode::mc && behavior == "pessimistic" && !inst.all_finite()) {
      // pointwise pessimistic sampling supports atomless instances
      McResult mc = mc_adversarial_principal(inst, mech, opt.samples, opt.seed);
      report.principal = Estimate::mc(mc.estimate, mc.stderr_, mc.samples);
      report.opt = Estimate::real(expected_opt_quadrature(inst));
      report.ratio = report.principal.as_double() / report.opt.as_double();
      report.mode = "mc";
      report.seed = opt.seed;
      report.samples = opt.samples;
    } else {
      auto adv = adversarial_profile(inst, mech,
                                     behavior == "constrained" ? AdversarialMode::constrained
                                                               : AdversarialMode::pessimistic);
      report = delegation_ratio(inst, mech, adv.profile, mode, opt.samples, opt.seed,
                                Exec::parallel, opt.profile_cap);
      report.zero_win_abstention = adv.zero_win_abstention;
    }
  } else if (behavior == "equilibrium") {
    if (inst.flavor() != Flavor::strategic)
      fail(Errc::config, "BadBehavior", "equilibrium search needs a strategic instance");
    EquilibriumResult eq = find_principal_best_equilibrium(inst, mech, opt.equilibrium_cap);
    report = delegation_ratio(inst, mech, eq.profile, mode, opt.samples, opt.seed, Exec::parallel,
                              opt.profile_cap);
  } else {
    fail(Errc::config, "BadBehavior",
         "--behavior must be auto, pessimistic, constrained, or equilibrium");
  }

  Json results = report_to_json(report);
  write_report(opt.out, eval_config(opt, "eval"), results);
  append_csv(opt.csv, report_csv_header(),
             report_csv_row(report, fs::path(opt.instance_path).filename().string(),
                            fs::path(opt.mechanism_path).filename().string()));
  std::cout << "E[principal]=" << format_double(report.principal.as_double())
            << " E[opt]=" << format_double(report.opt.as_double())
            << " ratio=" << format_double(report.ratio) << "\n";
  return 0;
}

int cmd_gap(const EvalOptions& opt) {
  Instance inst = load_instance(opt.instance_path);
  for (const Element& el : inst.elements())
    if (el.owner < 1)
      fail(Errc::config, "UnassignedElements",
           "instance has pool elements without owners; use shuffle-eval");
  const EvalMode mode = parse_mode(opt.mode);
  auto plans = atom_split_plan(inst);  // single plan when the quantile exists

  Json plan_array = Json::array();
  EvaluationReport best_report;
  Json best_plan;
  bool have = false;
  for (const ThresholdPlan& plan : plans) {
    Mechanism mech{plan_mechanism(plan, inst)};
    EvaluationReport report;
    if (mode == EvalMode::exact) {
      if (!inst.all_finite())
        fail(Errc::model_violation, "NotFinite",
             "exact gap evaluation needs finite supports; use --mode mc");
      // the adversarial profile is honest, so the factorized evaluator
      // applies whatever the joint type-space size
      report.principal = Estimate::exact(pessimistic_exact_utility(inst, mech));
      report.opt = Estimate::exact(expected_opt_exact(inst));
      report.ratio = report.principal.as_double() / report.opt.as_double();
      report.mode = "exact";
    } else {
      McResult mc = mc_adversarial_principal(inst, mech, opt.samples, opt.seed);
      report.principal = Estimate::mc(mc.estimate, mc.stderr_, mc.samples);
      if (inst.all_finite())
        report.opt = Estimate::exact(expected_opt_exact(inst));
      else
        report.opt = Estimate::real(expected_opt_quadrature(inst));
      report.ratio = report.principal.as_double() / report.opt.as_double();
      report.mode = "mc";
      report.seed = opt.seed;
      report.samples = opt.samples;
    }
    Json entry = plan_to_json(plan);
    entry["report"] = report_to_json(report);
    plan_array.push_back(entry);
    if (!have || report.ratio > best_report.ratio) {
      best_report = report;
      best_plan = plan_to_json(plan);
      have = true;
    }
  }

  Json results;
  results["p"] = plans.front().p;
  results["plans"] = std::move(plan_array);
  results["best_plan"] = best_plan;
  results["best"] = report_to_json(best_report);
  write_report(opt.out, eval_config(opt, "gap"), results);
  append_csv(opt.csv, report_csv_header(),
             report_csv_row(best_report, fs::path(opt.instance_path).filename().string(),
                            "quantile-threshold"));
  std::cout << "p=" << format_double(plans.front().p)
            << " best_ratio=" << format_double(best_report.ratio) << " plans=" << plans.size()
            << "\n";
  return 0;
}

int cmd_solve_p(int k, const std::string& out) {
  const double p = solve_p(k);
  Json config{{"command", "solve-p"}, {"k", k}};
  Json results;
  results["p"] = p;
  results["residual"] = std::pow(p, k) + p - 1.0;
  write_report(out, config, results);
  std::cout << "p(" << k << ") = " << format_double(p) << "\n";
  return 0;
}

int cmd_equilibrium(const EvalOptions& opt, const std::string& profile_out) {
  Instance inst = load_instance(opt.instance_path);
  Mechanism mech = load_mechanism(opt.mechanism_path, inst);
  EquilibriumResult eq = find_principal_best_equilibrium(inst, mech, opt.equilibrium_cap);
  EvaluationReport report = delegation_ratio(inst, mech, eq.profile, EvalMode::exact, 0, 0,
                                             Exec::parallel, opt.profile_cap);

  Json results = report_to_json(report);
  results["profiles_checked"] = eq.profiles_checked;
  results["equilibria_found"] = eq.equilibria_found;
  write_report(opt.out, eval_config(opt, "equilibrium"), results);
  if (!profile_out.empty())
    write_text(resolve_out(profile_out), profile_to_json(eq.profile, inst).dump(2) + "\n");
  std::cout << "equilibria=" << eq.equilibria_found
            << " E[principal]=" << format_double(report.principal.as_double())
            << " ratio=" << format_double(report.ratio) << "\n";
  return 0;
}

int cmd_analogous(const std::string& instance_path, const std::string& out) {
  Instance adv = load_instance(instance_path);
  Instance strat = build_analogous_strategic(adv);
  if (out.empty()) fail(Errc::config, "MissingOutput", "analogous needs --out");
  write_text(resolve_out(out), instance_to_json(strat).dump(2) + "\n");
  std::cout << "wrote analogous strategic instance to " << out << "\n";
  return 0;
}

int cmd_atom_scan(const EvalOptions& opt) {
  Instance inst = load_instance(opt.instance_path);
  if (!inst.all_finite())
    fail(Errc::model_violation, "NotFinite", "atom-scan needs finite supports");
  auto plans = atom_split_plan(inst);
  const Rational opt_value = expected_opt_exact(inst);
  if (!(opt_value > 0)) fail(Errc::model_violation, "ZeroOpt", "instance has zero expected opt");

  Json plan_array = Json::array();
  Rational best(-1);
  int best_j = 0;
  for (const ThresholdPlan& plan : plans) {
    Mechanism mech{plan_mechanism(plan, inst)};
    Rational value = pessimistic_exact_utility(inst, mech);
    Json entry = plan_to_json(plan);
    entry["E_principal"] = estimate_to_json(Estimate::exact(value));
    entry["ratio"] = to_double(value / opt_value);
    plan_array.push_back(entry);
    if (value > best) {
      best = value;
      best_j = plan.strict_count();
    }
  }
  const double best_ratio = to_double(best / opt_value);
  Json results;
  results["p"] = plans.front().p;
  results["E_opt"] = estimate_to_json(Estimate::exact(opt_value));
  results["plans"] = std::move(plan_array);
  results["best_strict_count"] = best_j;
  results["best_ratio"] = best_ratio;
  write_report(opt.out, eval_config(opt, "atom-scan"), results);
  std::cout << "p=" << format_double(plans.front().p)
            << " best_ratio=" << format_double(best_ratio) << " strict_count=" << best_j << "\n";
  return 0;
}

int cmd_shuffle_eval(const std::string& pool_path, int k, const std::string& variant_name,
                     const EvalOptions& opt) {
  Instance pool = load_instance(pool_path);
  ShuffleVariant variant;
  if (variant_name == "independent")
    variant = ShuffleVariant::independent;
  else if (variant_name == "balanced")
    variant = ShuffleVariant::balanced;
  else
    fail(Errc::config, "BadVariant", "--variant must be independent or balanced");
  const EvalMode mode = parse_mode(opt.mode);

  auto plans = shuffled_threshold_plans(pool, k);
  Json plan_array = Json::array();
  double best_ratio = -1.0;
  Json best_entry;
  for (const ThresholdPlan& plan : plans) {
    Json entry = plan_to_json(plan);
    double ratio;
    if (mode == EvalMode::exact) {
      auto eval = shuffled_exact_evaluation(pool, k, plan, variant, opt.profile_cap);
      entry["E_principal"] = estimate_to_json(Estimate::exact(eval.expected_principal));
      entry["E_opt"] = estimate_to_json(Estimate::exact(eval.expected_opt));
      entry["assignments"] = eval.assignments;
      ratio = eval.ratio;
    } else {
      McResult mc = shuffled_mc_evaluation(pool, k, plan, variant, opt.samples, opt.seed);
      double opt_value = pool.all_finite() ? to_double(expected_opt_exact(pool))
                                           : expected_opt_quadrature(pool);
      entry["E_principal"] = estimate_to_json(Estimate::mc(mc.estimate, mc.stderr_, mc.samples));
      entry["E_opt"] = pool.all_finite()
                           ? estimate_to_json(Estimate::exact(expected_opt_exact(pool)))
                           : estimate_to_json(Estimate::real(opt_value));
      ratio = mc.estimate / opt_value;
    }
    entry["ratio"] = ratio;
    plan_array.push_back(entry);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_entry = entry;
    }
  }

  Json config;
  config["command"] = "shuffle-eval";
  config["pool"] = pool_path;
  config["k"] = k;
  config["variant"] = variant_name;
  config["mode"] = opt.mode;
  if (mode == EvalMode::mc) {
    config["samples"] = opt.samples;
    config["seed"] = opt.seed;
  }
  Json results;
  results["p"] = plans.front().p;
  results["plans"] = std::move(plan_array);
  results["best_ratio"] = best_ratio;
  results["best_plan"] = best_entry;
  write_report(opt.out, config, results);
  std::cout << "p=" << format_double(plans.front().p)
            << " best_ratio=" << format_double(best_ratio) << " plans=" << plans.size() << "\n";
  return 0;
}

int cmd_hard_instance(int k, const std::string& eps_text, bool scan, const std::string& write_path,
                      const EvalOptions& opt) {
  const Rational eps = parse_eps(eps_text);
  auto f = hard_instance_formulas(k, eps);
  Instance inst = hard_instance(k, eps);

  Json config{{"command", "hard-instance"}, {"k", k}, {"eps", rational_string(eps)}};
  if (scan) config["scan"] = true;
  Json results;
  results["E_opt"] = estimate_to_json(Estimate::exact(f.e_opt));
  results["E_A"] = estimate_to_json(Estimate::exact(f.e_a));
  results["E_B"] = estimate_to_json(Estimate::exact(f.e_b));
  results["ratio"] = to_double(f.ratio);
  results["limit"] = to_double(f.limit);

  // cross-check the closed forms against the enumeration
  results["enumeration_matches"] =
      expected_opt_exact(inst) == f.e_opt &&
      pessimistic_exact_utility(inst, Mechanism{hard_mechanism_a(inst, eps)}) == f.e_a &&
      pessimistic_exact_utility(inst, Mechanism{hard_mechanism_b(inst, eps)}) == f.e_b;

  if (scan) {
    ScanResult s = exhaustive_mechanism_scan(inst);
    results["scan"] = Json{{"mechanisms", s.mechanism_count},
                           {"max", estimate_to_json(Estimate::exact(s.best_utility))},
                           {"max_equals_A", s.best_utility == f.e_a},
                           {"argmax_count", s.argmax_count}};
  }
  if (!write_path.empty())
    write_text(resolve_out(write_path), instance_to_json(inst).dump(2) + "\n");
  write_report(opt.out, config, results);

  EvaluationReport rep;
  rep.principal = Estimate::exact(f.e_a);
  rep.opt = Estimate::exact(f.e_opt);
  rep.ratio = to_double(f.ratio);
  rep.mode = "exact";
  append_csv(opt.csv, report_csv_header(), report_csv_row(rep, "hard-instance", "A"));
  std::cout << "E_opt=" << format_double(to_double(f.e_opt))
            << " best=" << format_double(to_double(f.e_a))
            << " ratio=" << format_double(to_double(f.ratio))
            << " limit=" << format_double(to_double(f.limit));
  if (scan) std::cout << " scan=" << (results["scan"]["max_equals_A"].get<bool>() ? "ok" : "FAIL");
  std::cout << "\n";
  return 0;
}

int cmd_asymptotics(int kmin, int kmax, const std::string& csv, const std::string& out) {
  if (kmin < 2 || kmax < kmin) fail(Errc::config, "InvalidRange", "need 2 <= kmin <= kmax");
  std::string rows = asymptotics_csv_header() + "\n";
  bool all_ok = true;
  Json arr = Json::array();
  for (int k = kmin; k <= kmax; ++k) {
    AsymptoticsRecord rec = asymptotic_check(k);
    rows += asymptotics_csv_row(rec) + "\n";
    all_ok = all_ok && rec.bracket_ok && rec.p_inside;
    if (k == kmin || k == kmax)
      arr.push_back(Json{{"k", rec.k},
                         {"g_minus", rec.g_minus},
                         {"g_plus", rec.g_plus},
                         {"p", rec.p},
                         {"lower", rec.lower},
                         {"upper", rec.upper}});
  }
  if (!csv.empty()) write_text(resolve_out(csv), rows);
  Json config{{"command", "asymptotics"}, {"kmin", kmin}, {"kmax", kmax}};
  Json results{{"all_brackets_hold", all_ok}, {"endpoints", arr}};
  write_report(out, config, results);
  std::cout << "k=" << kmin << ".." << kmax << " brackets " << (all_ok ? "hold" : "FAIL") << "\n";
  return all_ok ? 0 : 4;
}

int cmd_plot_data(const std::string& kind, int k, int kmin, int kmax,
                  std::vector<std::string> eps_list, const std::string& csv) {
  if (csv.empty()) fail(Errc::config, "MissingOutput", "plot-data needs --csv");
  std::string body;
  if (kind == "bounds_vs_k") {
    if (kmin < 2 || kmax < kmin) fail(Errc::config, "InvalidRange", "need 2 <= kmin <= kmax");
    body += "# k,p,lower_1_minus_(1+ln k)/k,upper_1_minus_(ln k-ln ln k)/(2k),limit_1_minus_1/(2k+1)\n";
    for (int kk = kmin; kk <= kmax; ++kk) {
      AsymptoticsRecord rec = asymptotic_check(kk);
      const double limit = 1.0 - 1.0 / (2.0 * kk + 1.0);
      body += std::to_string(kk) + "," + format_double(rec.p) + "," + format_double(rec.lower) +
              "," + format_double(rec.upper) + "," + format_double(limit) + "\n";
    }
  } else if (kind == "ratio_vs_k") {
    if (kmin < 2 || kmax < kmin) fail(Errc::config, "InvalidRange", "need 2 <= kmin <= kmax");
    if (eps_list.empty()) eps_list = {"1/100"};
    const Rational eps = parse_eps(eps_list.front());
    body += "# k,ratio,limit (eps=" + rational_string(eps) + ")\n";
    for (int kk = kmin; kk <= kmax; ++kk) {
      auto f = hard_instance_formulas(kk, eps);
      body += std::to_string(kk) + "," + format_double(to_double(f.ratio)) + "," +
              format_double(to_double(f.limit)) + "\n";
    }
  } else if (kind == "ratio_vs_eps") {
    if (k < 2) fail(Errc::config, "InvalidRange", "need -k >= 2");
    if (eps_list.empty()) fail(Errc::config, "InvalidRange", "need --eps values");
    body += "# eps,ratio,limit (k=" + std::to_string(k) + ")\n";
    for (const std::string& e : eps_list) {
      const Rational eps = parse_eps(e);
      auto f = hard_instance_formulas(k, eps);
      body += rational_string(eps) + "," + format_double(to_double(f.ratio)) + "," +
              format_double(to_double(f.limit)) + "\n";
    }
  } else {
    fail(Errc::config, "BadKind", "--kind must be bounds_vs_k, ratio_vs_k, or ratio_vs_eps");
  }
  write_text(resolve_out(csv), body);
  std::cout << "wrote " << kind << " to " << csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delegated-search mechanisms: evaluation, equilibria, and bound checks"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = library default, never affects results)");

  EvalOptions opt;
  int k = 2, kmin = 2, kmax = 100;
  std::string eps_text = "1/10";
  std::string pool_path, profile_out, write_path, variant = "independent", kind;
  std::vector<std::string> eps_list;
  bool scan = false;

  auto* sp = app.add_subcommand("solve-p", "root of p^k + p - 1 = 0");
  sp->add_option("-k,--agents", k, "agent count")->required();
  sp->add_option("--out", opt.out, "JSON report path");

  auto add_eval_opts = [&](CLI::App* cmd, bool with_mech) {
    cmd->add_option("--instance", opt.instance_path, "instance JSON file")->required();
    if (with_mech)
      cmd->add_option("--mechanism", opt.mechanism_path, "mechanism JSON file")->required();
    cmd->add_option("--mode", opt.mode, "exact or mc");
    cmd->add_option("--samples", opt.samples, "Monte Carlo sample count");
    cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
    cmd->add_option("--profile-cap", opt.profile_cap, "joint type-space enumeration cap");
    cmd->add_option("--out", opt.out, "JSON report path");
    cmd->add_option("--csv", opt.csv, "CSV report path");
  };

  auto* ev = app.add_subcommand("eval", "evaluate a mechanism on an instance");
  add_eval_opts(ev, true);
  ev->add_option("--behavior", opt.behavior, "auto, pessimistic, constrained, or equilibrium");
  ev->add_option("--equilibrium-cap", opt.equilibrium_cap, "strategy-profile search cap");

  auto* gap = app.add_subcommand("gap", "quantile-threshold lower-bound pipeline");
  add_eval_opts(gap, false);

  auto* eq = app.add_subcommand("equilibrium", "principal-best pure equilibrium search");
  eq->add_option("--instance", opt.instance_path, "instance JSON file")->required();
  eq->add_option("--mechanism", opt.mechanism_path, "mechanism JSON file")->required();
  eq->add_option("--equilibrium-cap", opt.equilibrium_cap, "strategy-profile search cap");
  eq->add_option("--profile-cap", opt.profile_cap, "joint type-space enumeration cap");
  eq->add_option("--out", opt.out, "JSON report path");
  eq->add_option("--profile-out", profile_out, "strategy profile JSON path");

  auto* an = app.add_subcommand("analogous", "strategic instance with the dominance y-values");
  an->add_option("--instance", opt.instance_path, "adversarial instance JSON file")->required();
  an->add_option("--out", opt.out, "output instance path")->required();

  auto* as = app.add_subcommand("atom-scan", "the k+1 determinized threshold plans, exactly");
  as->add_option("--instance", opt.instance_path, "instance JSON file")->required();
  as->add_option("--out", opt.out, "JSON report path");

  auto* sh = app.add_subcommand("shuffle-eval", "shuffled-pool threshold plans");
  sh->add_option("--pool", pool_path, "pool JSON file (unowned elements)")->required();
  sh->add_option("-k,--agents", k, "agent count")->required();
  sh->add_option("--variant", variant, "independent or balanced");
  sh->add_option("--mode", opt.mode, "exact or mc");
  sh->add_option("--samples", opt.samples, "Monte Carlo sample count");
  sh->add_option("--seed", opt.seed, "Monte Carlo seed");
  sh->add_option("--profile-cap", opt.profile_cap, "assignment enumeration cap");
  sh->add_option("--out", opt.out, "JSON report path");

  auto* hi = app.add_subcommand("hard-instance", "two-outcome upper-bound family");
  hi->add_option("-k,--agents", k, "agent count")->required();
  hi->add_option("--eps", eps_text, "rational epsilon, e.g. 1/10")->required();
  hi->add_flag("--scan", scan, "run the exhaustive acceptance-set scan");
  hi->add_option("--write", write_path, "write the instance JSON here");
  hi->add_option("--out", opt.out, "JSON report path");
  hi->add_option("--csv", opt.csv, "CSV report path");

  auto* asy = app.add_subcommand("asymptotics", "bracket checks for p = 1 - Theta(ln k / k)");
  asy->add_option("--kmin", kmin, "smallest k");
  asy->add_option("--kmax", kmax, "largest k");
  asy->add_option("--csv", opt.csv, "CSV output path");
  asy->add_option("--out", opt.out, "JSON report path");

  auto* pd = app.add_subcommand("plot-data", "CSV series for plots");
  pd->add_option("--kind", kind, "bounds_vs_k, ratio_vs_k, or ratio_vs_eps")->required();
  pd->add_option("-k,--agents", k, "agent count (ratio_vs_eps)");
  pd->add_option("--kmin", kmin, "smallest k");
  pd->add_option("--kmax", kmax, "largest k");
  pd->add_option("--eps", eps_list, "epsilon list, e.g. 1/10 1/100");
  pd->add_option("--csv", opt.csv, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (sp->parsed()) return cmd_solve_p(k, opt.out);
    if (ev->parsed()) return cmd_eval(opt);
    if (gap->parsed()) return cmd_gap(opt);
    if (eq->parsed()) return cmd_equilibrium(opt, profile_out);
    if (an->parsed()) return cmd_analogous(opt.instance_path, opt.out);
    if (as->parsed()) return cmd_atom_scan(opt);
    if (sh->parsed()) return cmd_shuffle_eval(pool_path, k, variant, opt);
    if (hi->parsed()) return cmd_hard_instance(k, eps_text, scan, write_path, opt);
    if (asy->parsed()) return cmd_asymptotics(kmin, kmax, opt.csv, opt.out);
    if (pd->parsed()) return cmd_plot_data(kind, k, kmin, kmax, eps_list, opt.csv);
  } catch (const Error& e) {
    std::cerr << "error " << e.tag() << ": " << e.message() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error Internal: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
