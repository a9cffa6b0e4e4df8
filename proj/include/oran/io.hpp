#pragma once

// Canonical JSON documents (sorted keys, shortest round-trip numbers) for
// scenarios, assignments and configs.

#include <string>

#include "json.hpp"
#include "oran/assoc.hpp"
#include "oran/cost.hpp"
#include "oran/deploy.hpp"
#include "oran/scenario.hpp"

namespace oran::io {

using Json = nlohmann::json;

Json to_json(const scenario::Scenario& sc);
scenario::Scenario scenario_from_json(const Json& j);

/// Assignment with per-UE OTA latencies.
Json to_json(const assoc::P1Model& m, const assoc::Assignment& a);
assoc::Assignment assignment_from_json(const Json& j);

/// Coefficient tables of P1 for external cross-checks.
Json dump_model(const assoc::P1Model& m);

/// Deployment plan with per-link latency annotations.
Json to_json(const deploy::P2Model& m, const deploy::DeploymentPlan& p);
deploy::DeploymentPlan plan_from_json(const deploy::P2Model& m, const Json& j);

/// Coefficient tables of P2 for external cross-checks.
Json dump_model(const deploy::P2Model& m);

Json to_json(const cost::CostBreakdown& c);
Json to_json(const cost::OtnResult& r);
Json to_json(const cost::PriceBook& b);
cost::PriceBook price_book_from_json(const Json& j, cost::PriceBook base);
Json to_json(const deploy::DeployConfig& c);
deploy::DeployConfig deploy_config_from_json(const Json& j, deploy::DeployConfig base);

Json to_json(const scenario::GenerationConfig& cfg);
/// Applies the keys present in `j` on top of `base`.
scenario::GenerationConfig generation_from_json(const Json& j, scenario::GenerationConfig base);

/// Two-space indented text with a trailing newline.
std::string canonical(const Json& j);

std::string read_file(const std::string& path);
/// Throws std::runtime_error when the destination cannot be written.
void write_file(const std::string& path, const std::string& text);

}  // namespace oran::io
