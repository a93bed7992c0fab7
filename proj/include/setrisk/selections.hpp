#pragma once

#include "setrisk/geom2d.hpp"
#include "setrisk/markets.hpp"
#include "setrisk/riskstats.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace setrisk {

// Post-trade gains per scenario (n x d, row-major).
struct SelectionMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> gains;
    std::string provenance;

    Point2 row2(std::size_t i) const { return {gains[i * d], gains[i * d + 1]}; }
    std::span<const double> row(std::size_t i) const { return {gains.data() + i * d, d}; }
    std::vector<double> column(std::size_t j) const;
};

struct StrategyGrid {
    std::vector<double> t_values;
    std::vector<double> lambda_values;

    // 0 followed by `count` geometric points from t_max/1000 to t_max.
    static std::vector<double> geometric_t(double t_max = 4.0, int count = 33);
    // `count` uniform points on [0, 1].
    static std::vector<double> uniform_lambda(int count = 21);
    static StrategyGrid defaults(double t_max = 4.0) { return {geometric_t(t_max), uniform_lambda()}; }
    void validate() const;
};

enum class RaySide { Both, Ray1, Ray2 };
RaySide parse_ray_side(const std::string& s);
std::string to_string(RaySide s);

// Per-scenario direction eta in K with the solvency ray it came from
// (0: none, 1: the (-1, pi21) ray, 2: the (pi12, -1) ray).
struct ShiftDirection {
    std::vector<Point2> eta;
    std::vector<int> ray;
};

SelectionMatrix identity_selection(const ScenarioEnsemble& e);
SelectionMatrix frictionless_projection(const ScenarioEnsemble& e);

// -(projection of y onto the nearer boundary ray of the solvency cone),
// or zero when -y already lies in the dual cone.
std::pair<Point2, int> project_to_solvency_boundary(Point2 y, const ExchangeCone2D& k, RaySide side);
ShiftDirection quantile_shift_projection(const ScenarioEnsemble& e, const ExchangeCone2D& k, double alpha,
                                         RaySide side);

SelectionMatrix shift_selection(const ScenarioEnsemble& e, std::span<const Point2> eta, double t,
                                const std::string& provenance = "shift");
std::vector<SelectionMatrix> scaled_family(const ScenarioEnsemble& e, std::span<const Point2> eta,
                                           const StrategyGrid& grid);
// X + t (base - X)
std::vector<SelectionMatrix> scaled_family(const ScenarioEnsemble& e, const SelectionMatrix& base,
                                           const StrategyGrid& grid);
// Scenarios on ray 1 move by t*eta, those on ray 2 by s*eta, for (t,s) on grid^2.
std::vector<SelectionMatrix> two_sided_family(const ScenarioEnsemble& e, const ShiftDirection& dir,
                                              const StrategyGrid& grid);

SelectionMatrix liquidity_capped_projection(const ScenarioEnsemble& e, Point2 cap = {1, 1});
std::pair<SelectionMatrix, SelectionMatrix> liquidity_corners(const ScenarioEnsemble& e, Point2 cap = {1, 1});

// Corner points x1 (first coordinate deterministic) and x2 (second one).
std::pair<Point2, Point2> meetk_corner_points(const ScenarioEnsemble& e, const ExchangeCone2D& k,
                                              const RiskSpec& spec);
std::pair<SelectionMatrix, SelectionMatrix> meetk_selections(const ScenarioEnsemble& e, const ExchangeCone2D& k);

SelectionMatrix boost_worst_coordinate(const ScenarioEnsemble& e, double radius);
SelectionMatrix ball_direction(const ScenarioEnsemble& e, double radius, Point2 dir);
// Everything moved into one currency at the scenario rate: currency 1 gives
// (X1 + X2/pi, 0), currency 2 gives (0, pi X1 + X2).
SelectionMatrix axis_transfer(const ScenarioEnsemble& e, int currency);

// lambda * a + (1 - lambda) * b for each lambda
std::vector<SelectionMatrix> convex_mix(const SelectionMatrix& a, const SelectionMatrix& b,
                                        std::span<const double> lambdas);

// A family of selections generated on demand, so large ensembles never hold
// more than a few matrices at once.
struct SelectionFamily {
    std::string name;
    std::size_t count = 0;
    std::function<SelectionMatrix(std::size_t)> make;
};

std::vector<SelectionMatrix> materialize(const SelectionFamily& f);

struct StrategySpec {
    std::string strategy = "identity";
    RaySide side = RaySide::Both;
    double t_max = 4.0;
    int t_count = 33;
    int lambda_count = 21;

    StrategyGrid grid() const { return {StrategyGrid::geometric_t(t_max, t_count), StrategyGrid::uniform_lambda(lambda_count)}; }
};

// Strategy ids accepted for each portfolio kind.
std::vector<std::string> strategies_for(PortfolioKind k);
std::vector<StrategySpec> default_strategies(PortfolioKind k);
// Families emitted by one strategy; throws on a strategy/kind mismatch.
std::vector<SelectionFamily> make_families(const SetPortfolio& p, const StrategySpec& s, const RiskSpec& risk);

struct AuditResult {
    bool ok = true;
    double worst = 0.0;  // largest <xi,u> - h(u) seen
    std::size_t scenario = 0;
};

AuditResult audit_selection(const SetPortfolio& p, const SelectionMatrix& s, int probes = 64);

}  // namespace setrisk
