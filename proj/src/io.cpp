#include "delsearch/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace delsearch {

std::optional<Rational> parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::string num, den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = std::string(trim(text.substr(0, slash)));
    den = std::string(trim(text.substr(slash + 1)));
  } else {
    num = std::string(text);
  }
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = s[0] == '-' || s[0] == '+' ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  if (!is_int(num) || !is_int(den)) return std::nullopt;
  try {
    mpz_class n(num), d(den);
    if (d == 0) return std::nullopt;
    Rational q(n, d);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

Rational mass_from_json(const Json& atom) {
  auto read_int = [](const Json& v) -> mpz_class {
    if (v.is_string()) return mpz_class(v.get<std::string>());
    return mpz_class(static_cast<long>(v.get<long long>()));
  };
  if (!atom.contains("p_num") || !atom.contains("p_den"))
    fail(Errc::config, "BadInstanceFile", "finite support atoms need p_num and p_den");
  mpz_class den = read_int(atom.at("p_den"));
  if (den == 0) fail(Errc::config, "BadInstanceFile", "zero denominator in support mass");
  Rational q(read_int(atom.at("p_num")), den);
  q.canonicalize();
  return q;
}

Json mass_to_json_num(const Rational& q) {
  // Small values as JSON integers, big ones as strings.
  if (q.get_num().fits_slong_p()) return Json(q.get_num().get_si());
  return Json(num_string(q));
}

Json mass_to_json_den(const Rational& q) {
  if (q.get_den().fits_slong_p()) return Json(q.get_den().get_si());
  return Json(den_string(q));
}

}  // namespace

Json instance_to_json(const Instance& inst) {
  Json j;
  j["k"] = inst.k();
  j["flavor"] = inst.flavor() == Flavor::strategic ? "strategic" : "adversarial";
  j["assignment_mode"] = inst.assignment_mode() == AssignmentMode::fixed ? "fixed" : "shuffled";
  Json elems = Json::array();
  for (const Element& el : inst.elements()) {
    Json je;
    if (el.owner >= 1) je["owner"] = el.owner;
    Json jd;
    if (const auto* fs = el.distribution.finite()) {
      jd["kind"] = "finite";
      Json support = Json::array();
      for (const FiniteAtom& a : fs->atoms) {
        Json ja;
        ja["x"] = a.x;
        if (a.y) ja["y"] = *a.y;
        ja["p_num"] = mass_to_json_num(a.mass);
        ja["p_den"] = mass_to_json_den(a.mass);
        support.push_back(std::move(ja));
      }
      jd["support"] = std::move(support);
    } else if (const auto* u = std::get_if<Uniform>(&el.distribution.law())) {
      jd["kind"] = "uniform";
      jd["params"] = Json{{"lo", u->lo}, {"hi", u->hi}};
    } else if (const auto* ex = std::get_if<Exponential>(&el.distribution.law())) {
      jd["kind"] = "exponential";
      jd["params"] = Json{{"rate", ex->rate}};
    } else {
      const auto& pts = std::get<PiecewiseLinearCdf>(el.distribution.law()).points;
      jd["kind"] = "piecewise_linear_cdf";
      Json jp = Json::array();
      for (const auto& [x, f] : pts) jp.push_back(Json::array({x, f}));
      jd["params"] = Json{{"points", std::move(jp)}};
    }
    je["distribution"] = std::move(jd);
    elems.push_back(std::move(je));
  }
  j["elements"] = std::move(elems);
  return j;
}

Instance instance_from_json(const Json& j) {
  try {
    const int k = j.at("k").get<int>();
    const std::string flavor_s = j.at("flavor").get<std::string>();
    const Flavor flavor = flavor_s == "strategic" ? Flavor::strategic : Flavor::adversarial;
    if (flavor_s != "strategic" && flavor_s != "adversarial")
      fail(Errc::config, "BadInstanceFile", "flavor must be strategic or adversarial");
    AssignmentMode mode = AssignmentMode::fixed;
    if (j.contains("assignment_mode")) {
      const std::string m = j.at("assignment_mode").get<std::string>();
      if (m == "shuffled")
        mode = AssignmentMode::shuffled;
      else if (m != "fixed")
        fail(Errc::config, "BadInstanceFile", "assignment_mode must be fixed or shuffled");
    }
    std::vector<Element> elements;
    for (const Json& je : j.at("elements")) {
      Element el;
      el.owner = je.contains("owner") ? je.at("owner").get<int>() : 0;
      const Json& jd = je.at("distribution");
      const std::string kind = jd.at("kind").get<std::string>();
      if (kind == "finite") {
        FiniteSupport fs;
        for (const Json& ja : jd.at("support")) {
          FiniteAtom atom;
          atom.x = ja.at("x").get<double>();
          if (ja.contains("y")) atom.y = ja.at("y").get<double>();
          atom.mass = mass_from_json(ja);
          fs.atoms.push_back(std::move(atom));
        }
        el.distribution = OutcomeDistribution(DistributionLaw{std::move(fs)});
      } else if (kind == "uniform") {
        el.distribution = OutcomeDistribution(DistributionLaw{
            Uniform{jd.at("params").at("lo").get<double>(), jd.at("params").at("hi").get<double>()}});
      } else if (kind == "exponential") {
        el.distribution =
            OutcomeDistribution(DistributionLaw{Exponential{jd.at("params").at("rate").get<double>()}});
      } else if (kind == "piecewise_linear_cdf") {
        PiecewiseLinearCdf pl;
        for (const Json& jp : jd.at("params").at("points"))
          pl.points.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
        el.distribution = OutcomeDistribution(DistributionLaw{std::move(pl)});
      } else {
        fail(Errc::config, "BadInstanceFile", "unknown distribution kind: " + kind);
      }
      elements.push_back(std::move(el));
    }
    return Instance(k, flavor, mode, std::move(elements));
  } catch (const Json::exception& e) {
    fail(Errc::config, "BadInstanceFile", e.what());
  }
}

namespace {

int element_index_checked(const Instance& inst, const Json& ref) {
  if (ref.is_number_integer()) {
    int e = ref.get<int>();
    if (e < 0 || e >= inst.element_count())
      fail(Errc::config, "BadMechanismFile", "element index out of range");
    return e;
  }
  int e = inst.element_by_id(ref.get<std::string>());
  if (e < 0)
    fail(Errc::config, "BadMechanismFile", "unknown element id " + ref.get<std::string>());
  return e;
}

TieOrder tie_from_json(const Json& j, const Instance& inst) {
  if (!j.contains("tie")) return TieOrder::default_order(inst);
  std::vector<int> order;
  for (const Json& ref : j.at("tie")) order.push_back(element_index_checked(inst, ref));
  if (static_cast<int>(order.size()) != inst.element_count())
    fail(Errc::config, "BadMechanismFile", "tie order must cover every element exactly once");
  std::vector<char> seen(static_cast<std::size_t>(inst.element_count()), 0);
  for (int e : order) {
    if (seen[static_cast<std::size_t>(e)])
      fail(Errc::config, "BadMechanismFile", "tie order repeats an element");
    seen[static_cast<std::size_t>(e)] = 1;
  }
  return TieOrder::from_order(std::move(order));
}

Json tie_to_json(const TieOrder& tie, const Instance& inst) {
  Json out = Json::array();
  for (int e : tie.order) out.push_back(inst.element_id(e));
  return out;
}

}  // namespace

Json mechanism_to_json(const Mechanism& mech, const Instance& inst) {
  Json j;
  if (const auto* t = std::get_if<ThresholdMechanism>(&mech)) {
    j["kind"] = "threshold";
    Json arr = Json::array();
    for (int e = 0; e < inst.element_count(); ++e) {
      const ThresholdEntry& te = t->theta[static_cast<std::size_t>(e)];
      arr.push_back(Json{{"element", inst.element_id(e)},
                         {"value", te.value},
                         {"mode", te.mode == ThresholdMode::weak ? "weak" : "strict"}});
    }
    j["thresholds"] = std::move(arr);
    j["tie"] = tie_to_json(t->tie, inst);
  } else if (const auto* s = std::get_if<SingleProposalMechanism>(&mech)) {
    j["kind"] = "single_proposal";
    Json arr = Json::array();
    for (int e = 0; e < inst.element_count(); ++e) {
      const AcceptanceSet& a = s->accept[static_cast<std::size_t>(e)];
      Json ja{{"element", inst.element_id(e)}};
      if (a.extensional) {
        Json ids = Json::array();
        for (std::size_t atom = 0; atom < a.atoms.size(); ++atom)
          if (a.atoms[atom])
            ids.push_back(inst.outcome_id(inst.outcome_at(e, static_cast<int>(atom))));
        ja["outcomes"] = std::move(ids);
      } else {
        ja["min_x"] = a.min_x;
        ja["strict"] = a.strict;
      }
      arr.push_back(std::move(ja));
    }
    j["accept"] = std::move(arr);
    j["tie"] = tie_to_json(s->tie, inst);
  } else {
    const auto& m = std::get<MyersonMechanism>(mech);
    j["kind"] = "myerson";
    Json arr = Json::array();
    for (int e = 0; e < inst.element_count(); ++e) {
      Json pts = Json::array();
      for (const auto& [x, v] : m.phi[static_cast<std::size_t>(e)].points)
        pts.push_back(Json::array({x, v}));
      arr.push_back(Json{{"element", inst.element_id(e)}, {"breakpoints", std::move(pts)}});
    }
    j["phi"] = std::move(arr);
    j["tie"] = tie_to_json(m.tie, inst);
  }
  return j;
}

Mechanism mechanism_from_json(const Json& j, const Instance& inst) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "threshold") {
      ThresholdMechanism mech;
      mech.theta.resize(static_cast<std::size_t>(inst.element_count()));
      std::vector<char> seen(static_cast<std::size_t>(inst.element_count()), 0);
      for (const Json& jt : j.at("thresholds")) {
        int e = element_index_checked(inst, jt.at("element"));
        seen[static_cast<std::size_t>(e)] = 1;
        ThresholdEntry te;
        te.value = jt.at("value").get<double>();
        const std::string mode = jt.value("mode", "weak");
        if (mode == "strict")
          te.mode = ThresholdMode::strict;
        else if (mode != "weak")
          fail(Errc::config, "BadMechanismFile", "threshold mode must be weak or strict");
        mech.theta[static_cast<std::size_t>(e)] = te;
      }
      for (int e = 0; e < inst.element_count(); ++e)
        if (!seen[static_cast<std::size_t>(e)])
          fail(Errc::config, "BadMechanismFile", "element " + inst.element_id(e) + " lacks a threshold");
      mech.tie = tie_from_json(j, inst);
      return mech;
    }
    if (kind == "single_proposal") {
      SingleProposalMechanism mech;
      mech.accept.resize(static_cast<std::size_t>(inst.element_count()));
      for (const Json& ja : j.at("accept")) {
        int e = element_index_checked(inst, ja.at("element"));
        if (ja.contains("outcomes")) {
          const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
          if (fs == nullptr)
            fail(Errc::config, "BadMechanismFile",
                 "outcome lists need finite supports; use min_x for atomless elements");
          std::vector<char> mask(fs->atoms.size(), 0);
          for (const Json& id : ja.at("outcomes")) {
            bool found = false;
            for (std::size_t atom = 0; atom < fs->atoms.size(); ++atom) {
              if (inst.outcome_id(inst.outcome_at(e, static_cast<int>(atom))) ==
                  id.get<std::string>()) {
                mask[atom] = 1;
                found = true;
              }
            }
            if (!found)
              fail(Errc::config, "BadMechanismFile", "unknown outcome id " + id.get<std::string>());
          }
          mech.accept[static_cast<std::size_t>(e)] = AcceptanceSet::outcomes(std::move(mask));
        } else {
          mech.accept[static_cast<std::size_t>(e)] = AcceptanceSet::interval(
              ja.at("min_x").get<double>(), ja.value("strict", false));
        }
      }
      mech.tie = tie_from_json(j, inst);
      return mech;
    }
    if (kind == "myerson") {
      MyersonMechanism mech;
      mech.phi.resize(static_cast<std::size_t>(inst.element_count()));
      for (const Json& jp : j.at("phi")) {
        int e = element_index_checked(inst, jp.at("element"));
        PiecewiseLinearFn fn;
        for (const Json& pt : jp.at("breakpoints"))
          fn.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        for (std::size_t i = 1; i < fn.points.size(); ++i)
          if (fn.points[i].first <= fn.points[i - 1].first ||
              fn.points[i].second < fn.points[i - 1].second)
            fail(Errc::config, "BadMechanismFile",
                 "virtual value breakpoints must be increasing in x and nondecreasing in value");
        mech.phi[static_cast<std::size_t>(e)] = std::move(fn);
      }
      mech.tie = tie_from_json(j, inst);
      return mech;
    }
    fail(Errc::config, "BadMechanismFile", "unknown mechanism kind: " + kind);
  } catch (const Json::exception& e) {
    fail(Errc::config, "BadMechanismFile", e.what());
  }
}

Json profile_to_json(const StrategyProfile& profile, const Instance& inst) {
  Json agents = Json::array();
  std::vector<int> own_atoms;
  for (const Strategy& s : profile.agents) {
    Json rows = Json::array();
    for (std::uint64_t t = 0; t < s.type_count(); ++t) {
      s.type_atoms(t, own_atoms);
      Json type_ids = Json::array();
      for (std::size_t j = 0; j < s.elements().size(); ++j)
        type_ids.push_back(inst.outcome_id(inst.outcome_at(s.elements()[j], own_atoms[j])));
      const AgentAction& act = s.at(t);
      Json row;
      row["type"] = std::move(type_ids);
      row["propose"] = act.abstain() ? Json("abstain") : Json(inst.element_id(act.element));
      rows.push_back(std::move(row));
    }
    agents.push_back(Json{{"agent", s.agent()}, {"strategy", std::move(rows)}});
  }
  return Json{{"agents", std::move(agents)}};
}

Json estimate_to_json(const Estimate& e) {
  Json j;
  switch (e.kind) {
    case Estimate::Kind::rational:
      j["num"] = num_string(e.value);
      j["den"] = den_string(e.value);
      j["value"] = e.as_double();
      break;
    case Estimate::Kind::real:
      j["value"] = e.estimate;
      break;
    case Estimate::Kind::mc:
      j["estimate"] = e.estimate;
      j["stderr"] = e.stderr_;
      j["samples"] = e.samples;
      break;
  }
  return j;
}

Json report_to_json(const EvaluationReport& report) {
  Json j;
  j["mode"] = report.mode;
  if (report.mode == "mc") {
    j["seed"] = report.seed;
    j["samples"] = report.samples;
  }
  j["expected_principal"] = estimate_to_json(report.principal);
  j["expected_opt"] = estimate_to_json(report.opt);
  j["ratio"] = report.ratio;
  if (report.zero_win_abstention) j["zero_win_abstention"] = true;
  return j;
}

std::string report_csv_header() {
  return "instance,mechanism,mode,seed,samples,E_principal,stderr,E_opt,ratio";
}

std::string report_csv_row(const EvaluationReport& report, const std::string& instance_name,
                           const std::string& mechanism_name) {
  std::ostringstream os;
  os << instance_name << ',' << mechanism_name << ',' << report.mode << ','
     << (report.mode == "mc" ? std::to_string(report.seed) : std::string()) << ','
     << (report.mode == "mc" ? std::to_string(report.samples) : std::string()) << ','
     << format_double(report.principal.as_double()) << ','
     << (report.principal.kind == Estimate::Kind::mc ? format_double(report.principal.stderr_)
                                                     : std::string())
     << ',' << format_double(report.opt.as_double()) << ',' << format_double(report.ratio);
  return os.str();
}

Json plan_to_json(const ThresholdPlan& plan) {
  Json j;
  j["p"] = plan.p;
  j["t"] = plan.t;
  Json modes = Json::array();
  for (ThresholdMode m : plan.agent_modes) modes.push_back(m == ThresholdMode::weak ? "weak" : "strict");
  j["agent_modes"] = std::move(modes);
  switch (plan.provenance) {
    case PlanProvenance::atomless:
      j["provenance"] = "atomless";
      break;
    case PlanProvenance::atom_split:
      j["provenance"] = "atom_split";
      break;
    case PlanProvenance::shuffled:
      j["provenance"] = "shuffled";
      break;
  }
  if (plan.has_atom) {
    j["atom_x"] = plan.atom_x;
    j["phi"] = plan.phi;
  }
  return j;
}

std::string asymptotics_csv_header() { return "k,r_minus,r_plus,g_minus,g_plus,p,lower,upper"; }

std::string asymptotics_csv_row(const AsymptoticsRecord& rec) {
  std::ostringstream os;
  os << rec.k << ',' << format_double(rec.r_minus) << ',' << format_double(rec.r_plus) << ','
     << format_double(rec.g_minus) << ',' << format_double(rec.g_plus) << ','
     << format_double(rec.p) << ',' << format_double(rec.lower) << ','
     << format_double(rec.upper);
  return os.str();
}

Instance load_instance(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    fail(Errc::config, "BadInstanceFile", std::string(e.what()) + " in " + path.string());
  }
  return instance_from_json(j);
}

Mechanism load_mechanism(const std::filesystem::path& path, const Instance& inst) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    fail(Errc::config, "BadMechanismFile", std::string(e.what()) + " in " + path.string());
  }
  return mechanism_from_json(j, inst);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::config, "FileError", "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::config, "FileError", "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace delsearch
