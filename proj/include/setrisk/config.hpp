#pragma once

#include "setrisk/bounds.hpp"
#include "setrisk/geom2d.hpp"
#include "setrisk/scenarios.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace setrisk {

// One extra vertex matrix of a segment-hull portfolio: X + shift, scale * X,
// or gains read from a CSV of the same shape.
struct VertexSpec {
    std::optional<std::vector<double>> shift;
    std::optional<double> scale;
    std::optional<std::string> csv;
};

struct PortfolioSpec {
    PortfolioKind kind = PortfolioKind::ConeDet;
    double pi12 = 1.0;  // infinite when given as null
    double pi21 = 1.0;
    Point2 cap{1, 1};
    double radius = 1.0;
    std::vector<VertexSpec> vertices;
};

struct InlineScenarios {
    std::vector<std::vector<double>> points;
    std::optional<std::vector<double>> rates;
    std::optional<std::vector<double>> weights;
};

struct RunConfig {
    RiskSpec risk = RiskSpec::es(0.05);
    PortfolioSpec portfolio;
    std::vector<StrategySpec> strategies;  // empty: the kind's defaults
    int directions = 181;
    bool force_dual = false;  // "outer": "dual-halfspaces"

    // exactly one data source
    std::optional<GenSpec> generate;
    std::optional<std::string> input;
    std::optional<InlineScenarios> scenarios;

    std::string output = "out";
    std::optional<Box> window;
    bool boundary_csv = true;

    // Cross-field checks that need no data.
    void validate() const;
    BundleOptions bundle_options() const;
};

// Relative paths inside the config resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

ScenarioEnsemble load_ensemble(const RunConfig& c);
SetPortfolio build_portfolio(const RunConfig& c, std::shared_ptr<const ScenarioEnsemble> e);

// Loads the data, builds the portfolio and computes its bundle.
RiskBundle run_config(const RunConfig& c);

// "x0,y0,x1,y1"
Box parse_window(const std::string& s);

}  // namespace setrisk
