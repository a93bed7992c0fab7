#pragma once

#include "setrisk/geom2d.hpp"
#include "setrisk/riskstats.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace setrisk {

// pi(i,j): units of currency i paid for one unit of currency j.
class BidAskMatrix {
public:
    BidAskMatrix(std::size_t d, std::vector<double> entries);  // row-major
    std::size_t dim() const { return d_; }
    double operator()(std::size_t i, std::size_t j) const { return p_[i * d_ + j]; }

private:
    std::size_t d_;
    std::vector<double> p_;
};

// Exchange cone K in the plane generated by b1 = (1, -pi21), b2 = (-pi12, 1)
// together with the negative orthant. pi12 * pi21 == 1 gives a half-plane;
// infinite rates give K = R_-^2.
class ExchangeCone2D {
public:
    static ExchangeCone2D bid_ask(double pi12, double pi21);
    static ExchangeCone2D from_matrix(const BidAskMatrix& m);
    // one unit of currency 1 trades for pi units of currency 2
    static ExchangeCone2D frictionless(double pi);
    static ExchangeCone2D no_exchange();

    double pi12() const { return pi12_; }
    double pi21() const { return pi21_; }
    bool is_half_plane() const;

    // Dual generators (pi21, 1) and (1, pi12); unit axes when a rate is infinite.
    Point2 a1() const;
    Point2 a2() const;
    // Unit directions of the cone generators b1, b2.
    Point2 b1_dir() const { return normalized({1.0 / pi21_, -1.0}); }
    Point2 b2_dir() const { return normalized({-1.0, 1.0 / pi12_}); }

    ConvexCone2D cone() const;       // K
    ConvexCone2D solvency() const;   // -K
    ConvexCone2D dual() const;       // K' = {u : <u,x> <= 0 on K}

    bool contains(Point2 x, double tol = kGeomTol) const;
    bool solvency_contains(Point2 x, double tol = kGeomTol) const;
    bool dual_contains(Point2 u, double tol = kGeomTol) const;

private:
    double pi12_ = 0.0;
    double pi21_ = 0.0;
};

ConvexCone2D dual_cone(const ExchangeCone2D& k);
ConvexCone2D solvency_cone(const ExchangeCone2D& k);
bool cone_contains(const ExchangeCone2D& k, Point2 x);

// Weighted joint sample of gains (n x d, row-major) and optional rates.
class ScenarioEnsemble {
public:
    ScenarioEnsemble(std::size_t dim, std::vector<double> gains, std::optional<std::vector<double>> rates = {},
                     std::optional<std::vector<double>> weights = {});
    static ScenarioEnsemble from_points(const std::vector<Point2>& x, std::optional<std::vector<double>> rates = {},
                                        std::optional<std::vector<double>> weights = {});

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }
    double gain(std::size_t i, std::size_t j) const { return x_[i * d_ + j]; }
    Point2 gain2(std::size_t i) const { return {x_[i * d_], x_[i * d_ + 1]}; }
    std::span<const double> row(std::size_t i) const { return {x_.data() + i * d_, d_}; }
    const std::vector<double>& gains() const { return x_; }
    std::vector<double> column(std::size_t j) const;

    bool has_rates() const { return rates_.has_value(); }
    double rate(std::size_t i) const { return (*rates_)[i]; }
    const std::vector<double>& rates() const;

    bool uniform_weights() const { return uniform_; }
    double weight(std::size_t i) const { return uniform_ ? 1.0 / double(n_) : w_[i]; }
    std::vector<double> weights() const;
    // Sample view of per-scenario values under this ensemble's weights.
    SampleView sample(std::span<const double> values) const { return {values, w_, uniform_}; }

    // Same weights and rates, new gains.
    ScenarioEnsemble with_gains(std::vector<double> gains) const;
    ScenarioEnsemble permuted(std::span<const std::size_t> perm) const;

private:
    std::size_t n_ = 0, d_ = 0;
    std::vector<double> x_;
    std::optional<std::vector<double>> rates_;
    std::vector<double> w_;
    bool uniform_ = true;
};

enum class PortfolioKind { ConeDet, ConeHalfPlaneRandom, LiquidityCapped, Ball, SegmentHull };

std::string to_string(PortfolioKind k);
PortfolioKind parse_portfolio_kind(const std::string& s);

// A set-valued portfolio X_i = per-scenario closed convex lower set.
class SetPortfolio {
public:
    static SetPortfolio cone_det(std::shared_ptr<const ScenarioEnsemble> e, const ExchangeCone2D& k);
    static SetPortfolio cone_halfplane_random(std::shared_ptr<const ScenarioEnsemble> e);
    static SetPortfolio liquidity_capped(std::shared_ptr<const ScenarioEnsemble> e, Point2 cap = {1, 1});
    static SetPortfolio ball(std::shared_ptr<const ScenarioEnsemble> e, double radius);
    // Convex hull of X and further gain matrices (same shape), minus the orthant.
    static SetPortfolio segment_hull(std::shared_ptr<const ScenarioEnsemble> e,
                                     std::vector<std::vector<double>> other_vertices);

    PortfolioKind kind() const { return kind_; }
    const ScenarioEnsemble& ensemble() const { return *e_; }
    std::shared_ptr<const ScenarioEnsemble> ensemble_ptr() const { return e_; }
    std::size_t dim() const { return e_->dim(); }
    const ExchangeCone2D& cone() const;
    Point2 cap() const { return cap_; }
    double radius() const { return radius_; }
    std::size_t vertex_count() const { return 1 + others_.size(); }
    // Vertex j of scenario i; vertex 0 is X itself.
    std::span<const double> vertex(std::size_t j, std::size_t i) const;

    // Exchange cone of scenario i (cone-det: the fixed cone; random kinds:
    // the frictionless cone at the scenario rate).
    ExchangeCone2D scenario_cone(std::size_t i) const;

    // sup over the scenario set of <x,u>; +infinity when unbounded.
    double support(std::size_t i, std::span<const double> u) const;

    // Same parameters over a different ensemble of the same shape (extra
    // segment-hull vertices are kept as they are).
    SetPortfolio with_ensemble(std::shared_ptr<const ScenarioEnsemble> e) const;
    // c * X: gains, radius, cap and extra vertices all scale.
    SetPortfolio scaled(double c) const;
    // X + a in every scenario.
    SetPortfolio translated(std::span<const double> a) const;
    SetPortfolio permuted(std::span<const std::size_t> perm) const;

private:
    PortfolioKind kind_ = PortfolioKind::ConeDet;
    std::shared_ptr<const ScenarioEnsemble> e_;
    std::optional<ExchangeCone2D> k_;
    Point2 cap_{1, 1};
    double radius_ = 0.0;
    std::vector<std::vector<double>> others_;
};

double support_function(const SetPortfolio& p, std::size_t i, std::span<const double> u);

// Directions used to audit selections: a uniform fan over the nonnegative
// quadrant plus the scenario's extreme dual directions (d = 2), or a simplex
// lattice (d > 2).
std::vector<std::vector<double>> probe_directions(const SetPortfolio& p, std::size_t i, int count = 64);

}  // namespace setrisk
