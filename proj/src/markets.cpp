#include "setrisk/markets.hpp"

#include "setrisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace setrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDirTol = 1e-12;

void check_direction(std::span<const double> u, std::size_t d)
{
    if (u.size() != d) throw ValidationError("direction has wrong dimension");
    double nn = 0.0;
    for (double v : u) {
        if (!std::isfinite(v) || v < -kDirTol) throw ValidationError("support direction must lie in the nonnegative orthant");
        nn += v * v;
    }
    if (nn == 0.0) throw ValidationError("support direction must be nonzero");
}

double dot_span(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_span(std::span<const double> a) { return std::sqrt(dot_span(a, a)); }

}  // namespace

// ---- BidAskMatrix / ExchangeCone2D -----------------------------------------

BidAskMatrix::BidAskMatrix(std::size_t d, std::vector<double> entries) : d_(d), p_(std::move(entries))
{
    if (d == 0 || p_.size() != d * d) throw ValidationError("bid-ask matrix must be d x d");
    for (double v : p_)
        if (!(v > 0.0)) throw ValidationError("bid-ask entries must be positive");
    for (std::size_t i = 0; i < d; ++i)
        if (p_[i * d + i] != 1.0) throw ValidationError("bid-ask diagonal must be one");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j)
                if ((*this)(i, j) > (*this)(i, k) * (*this)(k, j) * (1 + 1e-12))
                    throw ValidationError("bid-ask matrix admits a cheaper indirect exchange");
}

ExchangeCone2D ExchangeCone2D::bid_ask(double pi12, double pi21)
{
    if (!(pi12 > 0.0) || !(pi21 > 0.0)) throw ValidationError("exchange rates must be positive");
    if (pi12 * pi21 < 1.0 - 1e-12) throw ValidationError("pi12 * pi21 < 1 allows arbitrage");
    ExchangeCone2D k;
    k.pi12_ = pi12;
    k.pi21_ = pi21;
    return k;
}

ExchangeCone2D ExchangeCone2D::from_matrix(const BidAskMatrix& m)
{
    if (m.dim() != 2) throw ValidationError("planar exchange cone needs a 2 x 2 matrix");
    return bid_ask(m(0, 1), m(1, 0));
}

ExchangeCone2D ExchangeCone2D::frictionless(double pi)
{
    if (!(pi > 0.0) || !std::isfinite(pi)) throw ValidationError("exchange rate must be positive");
    ExchangeCone2D k;
    k.pi12_ = 1.0 / pi;
    k.pi21_ = pi;
    return k;
}

ExchangeCone2D ExchangeCone2D::no_exchange() { return bid_ask(kInf, kInf); }

bool ExchangeCone2D::is_half_plane() const
{
    return std::isfinite(pi12_) && std::isfinite(pi21_) && std::abs(pi12_ * pi21_ - 1.0) <= 1e-12;
}

Point2 ExchangeCone2D::a1() const { return std::isfinite(pi21_) ? Point2{pi21_, 1.0} : Point2{1.0, 0.0}; }
Point2 ExchangeCone2D::a2() const { return std::isfinite(pi12_) ? Point2{1.0, pi12_} : Point2{0.0, 1.0}; }

ConvexCone2D ExchangeCone2D::dual() const
{
    if (is_half_plane()) return ConvexCone2D::from_rays(a1(), a1());
    return ConvexCone2D::from_rays(a1(), a2());
}

ConvexCone2D ExchangeCone2D::solvency() const
{
    if (is_half_plane()) return ConvexCone2D::half_plane(a1());
    return ConvexCone2D::from_rays(-b2_dir(), -b1_dir());
}

ConvexCone2D ExchangeCone2D::cone() const { return solvency().negated(); }

bool ExchangeCone2D::contains(Point2 x, double tol) const { return cone().contains(x, tol); }
bool ExchangeCone2D::solvency_contains(Point2 x, double tol) const { return solvency().contains(x, tol); }
bool ExchangeCone2D::dual_contains(Point2 u, double tol) const { return dual().contains(u, tol); }

ConvexCone2D dual_cone(const ExchangeCone2D& k) { return k.dual(); }
ConvexCone2D solvency_cone(const ExchangeCone2D& k) { return k.solvency(); }
bool cone_contains(const ExchangeCone2D& k, Point2 x) { return k.contains(x); }

// ---- ScenarioEnsemble ------------------------------------------------------

ScenarioEnsemble::ScenarioEnsemble(std::size_t dim, std::vector<double> gains, std::optional<std::vector<double>> rates,
                                   std::optional<std::vector<double>> weights)
    : d_(dim), x_(std::move(gains)), rates_(std::move(rates))
{
    if (d_ == 0) throw ValidationError("dimension must be positive");
    if (x_.empty() || x_.size() % d_ != 0) throw ValidationError("gains must form a nonempty n x d matrix");
    n_ = x_.size() / d_;
    for (double v : x_)
        if (!std::isfinite(v)) throw ValidationError("gains must be finite");
    if (rates_) {
        if (rates_->size() != n_) throw ValidationError("rate vector length differs from scenario count");
        for (double p : *rates_)
            if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("exchange rates must be positive and finite");
    }
    if (weights) {
        if (weights->size() != n_) throw ValidationError("weight vector length differs from scenario count");
        w_ = normalize_weights(std::move(*weights), uniform_);
        if (uniform_) w_.clear();
    }
}

ScenarioEnsemble ScenarioEnsemble::from_points(const std::vector<Point2>& x, std::optional<std::vector<double>> rates,
                                               std::optional<std::vector<double>> weights)
{
    std::vector<double> g;
    g.reserve(2 * x.size());
    for (auto p : x) {
        g.push_back(p.x);
        g.push_back(p.y);
    }
    return ScenarioEnsemble(2, std::move(g), std::move(rates), std::move(weights));
}

std::vector<double> ScenarioEnsemble::column(std::size_t j) const
{
    std::vector<double> c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = x_[i * d_ + j];
    return c;
}

const std::vector<double>& ScenarioEnsemble::rates() const
{
    if (!rates_) throw ValidationError("ensemble carries no exchange rates");
    return *rates_;
}

std::vector<double> ScenarioEnsemble::weights() const
{
    if (uniform_) return std::vector<double>(n_, 1.0 / double(n_));
    return w_;
}

ScenarioEnsemble ScenarioEnsemble::with_gains(std::vector<double> gains) const
{
    if (gains.size() != x_.size()) throw ValidationError("gain matrix shape mismatch");
    ScenarioEnsemble e = *this;
    for (double v : gains)
        if (!std::isfinite(v)) throw ValidationError("gains must be finite");
    e.x_ = std::move(gains);
    return e;
}

ScenarioEnsemble ScenarioEnsemble::permuted(std::span<const std::size_t> perm) const
{
    if (perm.size() != n_) throw ValidationError("permutation length mismatch");
    ScenarioEnsemble e = *this;
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t s = perm[i];
        if (s >= n_) throw ValidationError("permutation index out of range");
        for (std::size_t j = 0; j < d_; ++j) e.x_[i * d_ + j] = x_[s * d_ + j];
        if (rates_) (*e.rates_)[i] = (*rates_)[s];
        if (!uniform_) e.w_[i] = w_[s];
    }
    return e;
}

// ---- SetPortfolio ----------------------------------------------------------

std::string to_string(PortfolioKind k)
{
    switch (k) {
    case PortfolioKind::ConeDet: return "cone-det";
    case PortfolioKind::ConeHalfPlaneRandom: return "cone-halfplane-random";
    case PortfolioKind::LiquidityCapped: return "liquidity-capped";
    case PortfolioKind::Ball: return "ball";
    case PortfolioKind::SegmentHull: return "segment-hull";
    }
    return "?";
}

PortfolioKind parse_portfolio_kind(const std::string& s)
{
    for (auto k : {PortfolioKind::ConeDet, PortfolioKind::ConeHalfPlaneRandom, PortfolioKind::LiquidityCapped,
                   PortfolioKind::Ball, PortfolioKind::SegmentHull})
        if (s == to_string(k)) return k;
    throw ValidationError("unknown portfolio kind '" + s + "'");
}

SetPortfolio SetPortfolio::cone_det(std::shared_ptr<const ScenarioEnsemble> e, const ExchangeCone2D& k)
{
    if (!e) throw ValidationError("missing ensemble");
    if (e->dim() != 2) throw ValidationError("conical portfolios are planar");
    SetPortfolio p;
    p.kind_ = PortfolioKind::ConeDet;
    p.e_ = std::move(e);
    p.k_ = k;
    return p;
}

SetPortfolio SetPortfolio::cone_halfplane_random(std::shared_ptr<const ScenarioEnsemble> e)
{
    if (!e) throw ValidationError("missing ensemble");
    if (e->dim() != 2) throw ValidationError("conical portfolios are planar");
    if (!e->has_rates()) throw ValidationError("random half-plane portfolio needs a rate column (pi)");
    SetPortfolio p;
    p.kind_ = PortfolioKind::ConeHalfPlaneRandom;
    p.e_ = std::move(e);
    return p;
}

SetPortfolio SetPortfolio::liquidity_capped(std::shared_ptr<const ScenarioEnsemble> e, Point2 cap)
{
    if (!e) throw ValidationError("missing ensemble");
    if (e->dim() != 2) throw ValidationError("liquidity-capped portfolios are planar");
    if (!e->has_rates()) throw ValidationError("liquidity-capped portfolio needs a rate column (pi)");
    if (!(cap.x > 0.0) || !(cap.y > 0.0) || !std::isfinite(cap.x) || !std::isfinite(cap.y))
        throw ValidationError("liquidity cap must be positive and finite");
    SetPortfolio p;
    p.kind_ = PortfolioKind::LiquidityCapped;
    p.e_ = std::move(e);
    p.cap_ = cap;
    return p;
}

SetPortfolio SetPortfolio::ball(std::shared_ptr<const ScenarioEnsemble> e, double radius)
{
    if (!e) throw ValidationError("missing ensemble");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("ball radius must be positive");
    SetPortfolio p;
    p.kind_ = PortfolioKind::Ball;
    p.e_ = std::move(e);
    p.radius_ = radius;
    return p;
}

SetPortfolio SetPortfolio::segment_hull(std::shared_ptr<const ScenarioEnsemble> e,
                                        std::vector<std::vector<double>> other_vertices)
{
    if (!e) throw ValidationError("missing ensemble");
    if (other_vertices.empty()) throw ValidationError("segment hull needs at least one further vertex");
    for (const auto& v : other_vertices) {
        if (v.size() != e->gains().size()) throw ValidationError("segment vertex matrix shape mismatch");
        for (double x : v)
            if (!std::isfinite(x)) throw ValidationError("segment vertex must be finite");
    }
    SetPortfolio p;
    p.kind_ = PortfolioKind::SegmentHull;
    p.e_ = std::move(e);
    p.others_ = std::move(other_vertices);
    return p;
}

const ExchangeCone2D& SetPortfolio::cone() const
{
    if (!k_) throw ValidationError("portfolio has no deterministic cone");
    return *k_;
}

std::span<const double> SetPortfolio::vertex(std::size_t j, std::size_t i) const
{
    const std::size_t d = e_->dim();
    if (j == 0) return e_->row(i);
    return {others_.at(j - 1).data() + i * d, d};
}

ExchangeCone2D SetPortfolio::scenario_cone(std::size_t i) const
{
    switch (kind_) {
    case PortfolioKind::ConeDet: return *k_;
    case PortfolioKind::ConeHalfPlaneRandom:
    case PortfolioKind::LiquidityCapped: return ExchangeCone2D::frictionless(e_->rate(i));
    default: return ExchangeCone2D::no_exchange();
    }
}

double SetPortfolio::support(std::size_t i, std::span<const double> u) const
{
    check_direction(u, e_->dim());
    const auto x = e_->row(i);
    switch (kind_) {
    case PortfolioKind::ConeDet:
    case PortfolioKind::ConeHalfPlaneRandom: {
        ExchangeCone2D k = scenario_cone(i);
        Point2 uu = normalized({u[0], u[1]});
        bool in = k.is_half_plane() ? std::abs(cross(uu, normalized(k.a1()))) <= kDirTol
                                    : k.dual_contains(uu, kDirTol);
        return in ? dot_span(x, u) : kInf;
    }
    case PortfolioKind::LiquidityCapped: {
        double pi = e_->rate(i);
        return dot_span(x, u) + std::max(cap_.x * (u[0] - pi * u[1]), cap_.y * (u[1] - u[0] / pi));
    }
    case PortfolioKind::Ball: return dot_span(x, u) + radius_ * norm_span(u);
    case PortfolioKind::SegmentHull: {
        double best = dot_span(x, u);
        for (std::size_t j = 1; j < vertex_count(); ++j) best = std::max(best, dot_span(vertex(j, i), u));
        return best;
    }
    }
    return kInf;
}

double support_function(const SetPortfolio& p, std::size_t i, std::span<const double> u) { return p.support(i, u); }

SetPortfolio SetPortfolio::with_ensemble(std::shared_ptr<const ScenarioEnsemble> e) const
{
    if (!e || e->dim() != e_->dim() || e->size() != e_->size()) throw ValidationError("ensemble shape mismatch");
    if ((kind_ == PortfolioKind::ConeHalfPlaneRandom || kind_ == PortfolioKind::LiquidityCapped) && !e->has_rates())
        throw ValidationError("portfolio needs a rate column (pi)");
    SetPortfolio p = *this;
    p.e_ = std::move(e);
    return p;
}

SetPortfolio SetPortfolio::scaled(double c) const
{
    if (!(c > 0.0)) throw ValidationError("scale must be positive");
    std::vector<double> g = e_->gains();
    for (double& v : g) v *= c;
    SetPortfolio p = with_ensemble(std::make_shared<ScenarioEnsemble>(e_->with_gains(std::move(g))));
    p.radius_ *= c;
    p.cap_ = p.cap_ * c;
    for (auto& m : p.others_)
        for (double& v : m) v *= c;
    return p;
}

SetPortfolio SetPortfolio::translated(std::span<const double> a) const
{
    const std::size_t d = e_->dim();
    if (a.size() != d) throw ValidationError("translation dimension mismatch");
    std::vector<double> g = e_->gains();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += a[k % d];
    SetPortfolio p = with_ensemble(std::make_shared<ScenarioEnsemble>(e_->with_gains(std::move(g))));
    for (auto& m : p.others_)
        for (std::size_t k = 0; k < m.size(); ++k) m[k] += a[k % d];
    return p;
}

SetPortfolio SetPortfolio::permuted(std::span<const std::size_t> perm) const
{
    SetPortfolio p = with_ensemble(std::make_shared<ScenarioEnsemble>(e_->permuted(perm)));
    const std::size_t d = e_->dim();
    for (auto& m : p.others_) {
        std::vector<double> src = m;
        for (std::size_t i = 0; i < perm.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) m[i * d + j] = src[perm[i] * d + j];
    }
    return p;
}

std::vector<std::vector<double>> probe_directions(const SetPortfolio& p, std::size_t i, int count)
{
    std::vector<std::vector<double>> out;
    const std::size_t d = p.dim();
    if (d == 2) {
        for (int k = 0; k < count; ++k) {
            double a = std::numbers::pi / 2 * k / (count - 1);
            out.push_back({std::cos(a), std::sin(a)});
        }
        if (p.kind() == PortfolioKind::ConeDet || p.kind() == PortfolioKind::ConeHalfPlaneRandom ||
            p.kind() == PortfolioKind::LiquidityCapped) {
            auto k = p.scenario_cone(i);
            Point2 a1 = normalized(k.a1()), a2 = normalized(k.a2());
            out.push_back({a1.x, a1.y});
            out.push_back({a2.x, a2.y});
        }
        return out;
    }
    // simplex lattice with about `count` points
    int m = 1;
    auto lattice_size = [&](int mm) {
        double s = 1.0;
        for (std::size_t j = 1; j < d; ++j) s = s * double(mm + int(j)) / double(j);
        return s;
    };
    while (lattice_size(m + 1) <= count) ++m;
    std::vector<int> c(d, 0);
    auto rec = [&](auto&& self, std::size_t j, int left) -> void {
        if (j + 1 == d) {
            c[j] = left;
            std::vector<double> u(d);
            double nn = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                u[k] = c[k];
                nn += u[k] * u[k];
            }
            for (double& v : u) v /= std::sqrt(nn);
            out.push_back(std::move(u));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[j] = v;
            self(self, j + 1, left - v);
        }
    };
    rec(rec, 0, m);
    return out;
}

}  // namespace setrisk
