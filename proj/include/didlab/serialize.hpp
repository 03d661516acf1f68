#pragma once

#include "didlab/analytics.hpp"
#include "didlab/dgp.hpp"
#include "didlab/montecarlo.hpp"
#include "didlab/placebo.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace didlab::io {

using json = nlohmann::ordered_json;

json to_json(const FactorModelSpec& spec);
FactorModelSpec spec_from_json(const json& j);

json to_json(const mc::MCConfig& cfg);
mc::MCConfig mc_config_from_json(const json& j);

json to_json(const mc::MCReport& rep);
json to_json(const std::vector<mc::TwowayRow>& rows);
json to_json(const std::vector<mc::PretestRow>& rows);
json to_json(const std::vector<mc::StaggeredRow>& rows);
json to_json(const mc::ConditionalLambdaReport& rep);
json to_json(const mc::PretestNormalReport& rep);

/// Long-format CSV, one row per (experiment, params, estimator, variance) cell.
std::string twoway_csv(const std::vector<mc::TwowayRow>& rows);
std::string pretest_csv(const std::vector<mc::PretestRow>& rows);
std::string staggered_csv(const std::vector<mc::StaggeredRow>& rows);
std::string mc_report_csv(const mc::MCReport& rep, const std::string& experiment);
std::string placebo_curve_csv(const std::vector<placebo::CurvePoint>& curve);
std::string placebo_surface_csv(const std::vector<placebo::SurfacePoint>& surface);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const json& j);
json load_json(const std::string& path);

/// Every CLI run writes one of these next to its outputs, even on failure.
struct RunManifest {
    std::string subcommand;
    json resolved_config;
    std::uint64_t seed = 0;
    std::string version;
    std::string started_at;   // ISO-8601 UTC
    std::string finished_at;
    std::vector<std::string> outputs;
    int exit_code = 0;
    std::string error;        // empty on success

    json to_json() const;
    static RunManifest from_json(const json& j);
};

std::string iso8601_now();

}  // namespace didlab::io
