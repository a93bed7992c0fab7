#pragma once

// Random ensembles and portfolios shared by the bounds and acceptance suites.

#include "setrisk/bounds.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace setrisk;

using EnsPtr = std::shared_ptr<const ScenarioEnsemble>;

inline EnsPtr ens(const std::vector<Point2>& x, std::optional<std::vector<double>> r = {},
                   std::optional<std::vector<double>> w = {})
{
    return std::make_shared<ScenarioEnsemble>(ScenarioEnsemble::from_points(x, r, w));
}

inline EnsPtr nonmargin() { return ens({{-2, 4}, {4, -2}}); }

inline EnsPtr random_ensemble(std::mt19937_64& g, std::size_t n, bool weighted = false)
{
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.2, 1.0);
    double rho = std::uniform_real_distribution<double>(-0.8, 0.8)(g);
    std::vector<Point2> x(n);
    std::vector<double> r(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = z(g), b = z(g);
        x[i] = {a + 0.2, 0.7 * (rho * a + std::sqrt(1 - rho * rho) * b) - 0.1};
        r[i] = 1.3 * std::exp(0.3 * z(g) - 0.045);
        w[i] = u(g);
    }
    if (!weighted) return ens(x, r);
    double s = 0.0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    return ens(x, r, w);
}

// A within B: every vertex of A inside B and A's recession inside B's.
inline bool region_within(const RiskRegion2D& a, const RiskRegion2D& b, double tol = 1e-9)
{
    if (b.is_whole_plane()) return true;
    if (a.is_whole_plane()) return false;
    for (auto v : a.vertices())
        if (!b.contains(v, tol)) return false;
    return b.recession().contains_cone(a.recession(), 1e-9);
}

// Random points near the region's vertices, checked against membership.
inline std::vector<Point2> probe_points(const RiskRegion2D& r, std::mt19937_64& g, int count = 100)
{
    std::vector<Point2> out;
    std::normal_distribution<double> z(0.0, 1.0);
    for (int k = 0; k < count; ++k) {
        Point2 base = r.vertices().empty() ? Point2{} : r.vertices()[std::size_t(k) % r.vertices().size()];
        out.push_back(base + Point2{z(g), z(g)});
    }
    return out;
}

inline SetPortfolio random_portfolio(std::mt19937_64& g, int kind, std::size_t n, bool weighted = false)
{
    auto e = random_ensemble(g, n, weighted);
    std::uniform_real_distribution<double> rate(1.05, 3.0);
    switch (kind) {
    case 0: return SetPortfolio::cone_det(e, ExchangeCone2D::bid_ask(rate(g), rate(g)));
    case 1: return SetPortfolio::cone_halfplane_random(e);
    case 2: return SetPortfolio::liquidity_capped(e, {rate(g) - 0.8, rate(g) - 0.8});
    case 3: return SetPortfolio::ball(e, rate(g) - 1.0);
    default: {
        std::vector<double> other = e->gains();
        std::normal_distribution<double> z;
        for (double& v : other) v = -0.5 * v + 0.3 * z(g);
        return SetPortfolio::segment_hull(e, {other});
    }
    }
}

// Strategies whose selection of X + a is their selection of X plus a. The
// others project the origin or compare coordinates, so they move differently.
inline bool translation_equivariant(const std::string& s)
{
    return s == "identity" || s == "quantile-shift" || s == "quantile-shift-two-sided" || s == "meetk" ||
           s == "ball-fan" || s == "segment";
}

inline std::vector<StrategySpec> small_strategies(PortfolioKind k)
{
    auto s = default_strategies(k);
    for (auto& x : s) {
        x.t_count = 8;
        x.lambda_count = 6;
    }
    return s;
}

}  // namespace fixtures
