#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "delsearch/bounds.hpp"
#include "delsearch/engine.hpp"
#include "delsearch/mechanisms.hpp"
#include "delsearch/model.hpp"
#include "delsearch/strategy.hpp"

namespace delsearch {

// Keys keep insertion order so identical runs serialize to identical bytes.
using Json = nlohmann::ordered_json;

Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json mechanism_to_json(const Mechanism& mech, const Instance& inst);
Mechanism mechanism_from_json(const Json& j, const Instance& inst);

Json profile_to_json(const StrategyProfile& profile, const Instance& inst);

Json estimate_to_json(const Estimate& e);
Json report_to_json(const EvaluationReport& report);
// CSV row: instance,mechanism,mode,seed,samples,E_principal,stderr,E_opt,ratio
std::string report_csv_header();
std::string report_csv_row(const EvaluationReport& report, const std::string& instance_name,
                           const std::string& mechanism_name);

Json plan_to_json(const ThresholdPlan& plan);
std::string asymptotics_csv_header();
std::string asymptotics_csv_row(const AsymptoticsRecord& rec);

Instance load_instance(const std::filesystem::path& path);
Mechanism load_mechanism(const std::filesystem::path& path, const Instance& inst);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Full-precision, locale-independent double formatting.
std::string format_double(double v);

}  // namespace delsearch
