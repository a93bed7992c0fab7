#pragma once

#include "setrisk/geom2d.hpp"
#include "setrisk/halfspace.hpp"
#include "setrisk/markets.hpp"
#include "setrisk/riskstats.hpp"
#include "setrisk/selections.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace setrisk {

// Componentwise risk r(xi_j) of a selection, same functional in every currency.
std::vector<double> risk_vector(const ScenarioEnsemble& e, const SelectionMatrix& s, const RiskSpec& spec);
Point2 risk_point(const ScenarioEnsemble& e, const SelectionMatrix& s, const RiskSpec& spec);

// r(X) + R_+^2
RiskRegion2D regulator_region(const ScenarioEnsemble& e, const RiskSpec& spec);

// Risk points of every member of every family, in family order.
std::vector<Point2> evaluate_families(const ScenarioEnsemble& e, const std::vector<SelectionFamily>& families,
                                      const RiskSpec& spec);

// Best recession cone known to lie inside the true risk: the solvency cone
// for a fixed exchange cone, C1 for random half-planes, R_+^2 otherwise.
ConvexCone2D inner_recession(const SetPortfolio& p, const RiskSpec& spec);

RiskRegion2D inner_region_from_selections(const ScenarioEnsemble& e, std::span<const SelectionMatrix> sels,
                                          const RiskSpec& spec, const ConvexCone2D& recession);
// The identity selection is always added.
RiskRegion2D inner_region(const SetPortfolio& p, const std::vector<StrategySpec>& strategies, const RiskSpec& spec);

// {x : <x,a_i> >= r(<X,a_i>), i = 1,2} for the extreme dual directions a_i.
RiskRegion2D lower_bound_det_cone(const ScenarioEnsemble& e, const ExchangeCone2D& k, const RiskSpec& spec);

struct DualBound {
    HalfSpaceSet set{2};
    std::size_t used = 0;
    std::size_t skipped = 0;  // directions with infinite support somewhere
};

// Unit directions for the dual bound: `count` angles over the quarter turn
// plus the cone's extreme dual rays (d = 2), or a simplex lattice (d > 2).
std::vector<std::vector<double>> dual_directions(const SetPortfolio& p, int count = 181);

// Intersection of <x,u> >= r(h_X(u)) over the direction grid. Throws
// ModelingError when every direction is vacuous.
DualBound dual_halfspaces(const SetPortfolio& p, const RiskSpec& spec, int count = 181);
RiskRegion2D lower_bound_general(const SetPortfolio& p, const RiskSpec& spec, int count = 181);

struct LognormalRateModel {
    double mean = 1.0;
    double sigma = 0.4;
};

// C1 lies inside the risk of the random half-plane, C2 contains it. Slopes
// are reported as (lower-right ray, upper-left ray).
struct ConeBounds {
    ConvexCone2D c1;
    ConvexCone2D c2;
    std::pair<double, double> c1_slopes;
    std::pair<double, double> c2_slopes;
};

ConeBounds cone_risk_bounds(const LognormalRateModel& m, double alpha);
ConeBounds cone_risk_bounds(SampleView rates, double alpha);

// r(X) + cone
RiskRegion2D marginalized_bound(const ScenarioEnsemble& e, const ConvexCone2D& cone, const RiskSpec& spec);
RiskRegion2D marginalized_bound(const ScenarioEnsemble& e, const ExchangeCone2D& k, const RiskSpec& spec);

// -r(-X) + C2 for the random half-plane portfolio (expected shortfall only).
RiskRegion2D random_halfplane_outer(const ScenarioEnsemble& e, const RiskSpec& spec);

struct BundleOptions {
    RiskSpec risk = RiskSpec::es(0.05);
    std::vector<StrategySpec> strategies;  // empty: the kind's defaults
    int directions = 181;
    // the random half-plane otherwise uses the cone sandwich
    bool force_dual = false;
};

struct BundleMeta {
    std::string portfolio;
    std::string risk;
    std::size_t scenarios = 0;
    std::size_t dim = 0;
    std::vector<std::string> families;
    std::size_t selections = 0;
    std::string outer_method;
    std::size_t directions_used = 0;
    std::size_t directions_skipped = 0;
};

struct RiskBundle {
    // planar portfolios
    std::optional<RiskRegion2D> inner;
    std::optional<RiskRegion2D> outer;
    std::optional<RiskRegion2D> marginal;
    // d > 2: risk vectors of the selections and the dual half-spaces
    std::vector<std::vector<double>> inner_points;
    std::optional<HalfSpaceSet> outer_set;
    BundleMeta meta;
};

RiskBundle compute_bundle(const SetPortfolio& p, const BundleOptions& opt);

// (inf over inner, inf over outer); the first is never below the second.
std::pair<double, double> scalarize_bundle(const RiskBundle& b, std::span<const double> u);

}  // namespace setrisk
