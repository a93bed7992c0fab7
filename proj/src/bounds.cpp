#include "setrisk/bounds.hpp"

#include "setrisk/errors.hpp"
#include "setrisk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace setrisk {

namespace {

void check_planar(std::size_t d, const char* what)
{
    if (d != 2) throw ValidationError(std::string(what) + " is only available for two currencies");
}

void check_cone_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw ValidationError("cone bounds need a level in (0, 1/2], got " + std::to_string(alpha));
}

// Risk of per-scenario values; scenarios of zero weight are dropped first so
// an infinite value there cannot leak into the sum.
double risk_of(const RiskSpec& spec, const ScenarioEnsemble& e, const std::vector<double>& v)
{
    if (e.uniform_weights()) return risk_eval(spec, e.sample(v));
    std::vector<double> vals, w;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (e.weight(i) > 0.0) {
            vals.push_back(v[i]);
            w.push_back(e.weight(i));
        }
    return risk_eval(spec, SampleView{vals, w, false});
}

ConvexCone2D cone_from_slopes(double lower_right, double upper_left)
{
    return ConvexCone2D::from_rays({1.0, lower_right}, {-1.0, -upper_left});
}

// C1 from the risks of the two unit trades at the scenario rate.
ConvexCone2D c1_from_rates(const ScenarioEnsemble& e, const RiskSpec& spec)
{
    std::vector<double> pi = e.rates(), inv(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) inv[i] = 1.0 / pi[i];
    ConvexCone2D c = ConvexCone2D::from_rays({1.0, risk_of(spec, e, pi)}, {risk_of(spec, e, inv), 1.0});
    if (!c.contains_positive_orthant()) c = c.hull_with(ConvexCone2D::positive_orthant());
    return c;
}

std::vector<SelectionFamily> bundle_families(const SetPortfolio& p, const std::vector<StrategySpec>& strategies,
                                             const RiskSpec& spec)
{
    std::vector<SelectionFamily> fams;
    bool has_identity = false;
    for (const auto& s : strategies) {
        if (s.strategy == "identity") has_identity = true;
        for (auto& f : make_families(p, s, spec)) fams.push_back(std::move(f));
    }
    if (!has_identity) fams.insert(fams.begin(), make_families(p, StrategySpec{}, spec).front());
    return fams;
}

std::vector<std::vector<double>> evaluate_vectors(const ScenarioEnsemble& e,
                                                  const std::vector<SelectionFamily>& families, const RiskSpec& spec)
{
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (std::size_t j = 0; j < families[f].count; ++j) jobs.emplace_back(f, j);
    return parallel_map(jobs.size(), [&](std::size_t k) {
        const auto [f, j] = jobs[k];
        return risk_vector(e, families[f].make(j), spec);
    });
}

}  // namespace

std::vector<double> risk_vector(const ScenarioEnsemble& e, const SelectionMatrix& s, const RiskSpec& spec)
{
    if (s.n != e.size() || s.d != e.dim()) throw ValidationError("selection shape differs from the ensemble");
    std::vector<double> r(s.d);
    for (std::size_t j = 0; j < s.d; ++j) r[j] = risk_of(spec, e, s.column(j));
    return r;
}

Point2 risk_point(const ScenarioEnsemble& e, const SelectionMatrix& s, const RiskSpec& spec)
{
    check_planar(e.dim(), "a risk point");
    auto r = risk_vector(e, s, spec);
    return {r[0], r[1]};
}

RiskRegion2D regulator_region(const ScenarioEnsemble& e, const RiskSpec& spec)
{
    return marginalized_bound(e, ConvexCone2D::positive_orthant(), spec);
}

std::vector<Point2> evaluate_families(const ScenarioEnsemble& e, const std::vector<SelectionFamily>& families,
                                      const RiskSpec& spec)
{
    check_planar(e.dim(), "a planar risk region");
    auto v = evaluate_vectors(e, families, spec);
    std::vector<Point2> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = {v[k][0], v[k][1]};
    return out;
}

ConvexCone2D inner_recession(const SetPortfolio& p, const RiskSpec& spec)
{
    switch (p.kind()) {
    case PortfolioKind::ConeDet: return p.cone().solvency();
    case PortfolioKind::ConeHalfPlaneRandom: return c1_from_rates(p.ensemble(), spec);
    default: return ConvexCone2D::positive_orthant();
    }
}

RiskRegion2D inner_region_from_selections(const ScenarioEnsemble& e, std::span<const SelectionMatrix> sels,
                                          const RiskSpec& spec, const ConvexCone2D& recession)
{
    if (sels.empty()) throw ValidationError("no selections to build an inner region from");
    std::vector<Point2> pts;
    pts.reserve(sels.size());
    for (const auto& s : sels) pts.push_back(risk_point(e, s, spec));
    return RiskRegion2D::from_points_plus_cone(pts, recession);
}

RiskRegion2D inner_region(const SetPortfolio& p, const std::vector<StrategySpec>& strategies, const RiskSpec& spec)
{
    check_planar(p.dim(), "the inner region");
    auto pts = evaluate_families(p.ensemble(), bundle_families(p, strategies, spec), spec);
    return RiskRegion2D::from_points_plus_cone(pts, inner_recession(p, spec));
}

RiskRegion2D lower_bound_det_cone(const ScenarioEnsemble& e, const ExchangeCone2D& k, const RiskSpec& spec)
{
    check_planar(e.dim(), "the fixed-cone bound");
    HalfSpaceSet h(2);
    for (Point2 a : {k.a1(), k.a2()}) {
        std::vector<double> v(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) v[i] = dot(e.gain2(i), a);
        h.add(a, risk_of(spec, e, v));
    }
    return RiskRegion2D::from_halfspaces(h);
}

std::vector<std::vector<double>> dual_directions(const SetPortfolio& p, int count)
{
    if (count < 2) throw ValidationError("direction grid needs at least two directions");
    if (p.dim() != 2) return probe_directions(p, 0, count);
    std::vector<std::vector<double>> out;
    for (int k = 0; k < count; ++k) {
        double a = std::numbers::pi / 2 * k / (count - 1);
        out.push_back({std::cos(a), std::sin(a)});
    }
    // exact axes, not cos(pi/2)
    out.front() = {1.0, 0.0};
    out.back() = {0.0, 1.0};
    if (p.kind() == PortfolioKind::ConeDet)
        for (Point2 a : {p.cone().a1(), p.cone().a2()}) {
            Point2 u = normalized(a);
            out.push_back({u.x, u.y});
        }
    return out;
}

DualBound dual_halfspaces(const SetPortfolio& p, const RiskSpec& spec, int count)
{
    const auto& e = p.ensemble();
    const auto dirs = dual_directions(p, count);
    // c(u) = r(h_X(u)), or nothing where the support is infinite
    auto offsets = parallel_map(dirs.size(), [&](std::size_t k) -> std::optional<double> {
        std::vector<double> h(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            h[i] = p.support(i, dirs[k]);
            if (!std::isfinite(h[i]) && e.weight(i) > 0.0) return std::nullopt;
        }
        return risk_of(spec, e, h);
    });
    DualBound b;
    b.set = HalfSpaceSet(p.dim());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        if (!offsets[k]) {
            ++b.skipped;
            continue;
        }
        b.set.add(dirs[k], *offsets[k]);
        ++b.used;
    }
    if (b.used == 0)
        throw ModelingError("the dual bound is vacuous in every direction, so the outer region would be the whole "
                            "plane: no finite capital requirement can be certified for a " +
                            to_string(p.kind()) + " portfolio");
    return b;
}

RiskRegion2D lower_bound_general(const SetPortfolio& p, const RiskSpec& spec, int count)
{
    check_planar(p.dim(), "a planar outer region");
    return RiskRegion2D::from_halfspaces(dual_halfspaces(p, spec, count).set);
}

ConeBounds cone_risk_bounds(const LognormalRateModel& m, double alpha)
{
    check_cone_alpha(alpha);
    if (!(m.mean > 0.0) || !std::isfinite(m.mean)) throw ValidationError("rate mean must be positive");
    auto t = es_var_lognormal_mean_one(m.sigma, alpha);
    ConeBounds b;
    b.c1_slopes = {m.mean * t.es_pi, m.mean / t.es_inv_pi};
    b.c2_slopes = {m.mean * t.var_lo, m.mean * t.var_hi};
    b.c1 = cone_from_slopes(b.c1_slopes.first, b.c1_slopes.second);
    b.c2 = cone_from_slopes(b.c2_slopes.first, b.c2_slopes.second);
    return b;
}

ConeBounds cone_risk_bounds(SampleView rates, double alpha)
{
    check_cone_alpha(alpha);
    for (double v : rates.values)
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("rates must be positive and finite");
    std::vector<double> inv(rates.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / rates.values[i];
    ConeBounds b;
    b.c1_slopes = {es_empirical(rates, alpha), 1.0 / es_empirical({inv, rates.weights, rates.uniform}, alpha)};
    b.c2_slopes = {-left_quantile(rates, alpha), -left_quantile(rates, 1.0 - alpha)};
    b.c1 = cone_from_slopes(b.c1_slopes.first, b.c1_slopes.second);
    b.c2 = cone_from_slopes(b.c2_slopes.first, b.c2_slopes.second);
    return b;
}

RiskRegion2D marginalized_bound(const ScenarioEnsemble& e, const ConvexCone2D& cone, const RiskSpec& spec)
{
    check_planar(e.dim(), "a planar risk region");
    auto x = identity_selection(e);
    const Point2 r = risk_point(e, x, spec);
    return RiskRegion2D::from_points_plus_cone(std::span<const Point2>(&r, 1), cone);
}

RiskRegion2D marginalized_bound(const ScenarioEnsemble& e, const ExchangeCone2D& k, const RiskSpec& spec)
{
    return marginalized_bound(e, k.solvency(), spec);
}

RiskRegion2D random_halfplane_outer(const ScenarioEnsemble& e, const RiskSpec& spec)
{
    check_planar(e.dim(), "the random half-plane bound");
    if (spec.kind != RiskKind::ExpectedShortfall)
        throw ValidationError("the random half-plane outer bound is derived for expected shortfall only");
    if (!e.has_rates()) throw ValidationError("random half-plane portfolio needs a rate column (pi)");
    const auto& pi = e.rates();
    std::vector<double> w = e.weights();
    auto c2 = cone_risk_bounds(SampleView{pi, w, e.uniform_weights()}, spec.level).c2;
    Point2 v;
    for (std::size_t j = 0; j < 2; ++j) {
        auto col = e.column(j);
        for (double& x : col) x = -x;
        (j == 0 ? v.x : v.y) = -risk_of(spec, e, col);
    }
    return RiskRegion2D::from_points_plus_cone(std::span<const Point2>(&v, 1), c2);
}

RiskBundle compute_bundle(const SetPortfolio& p, const BundleOptions& opt)
{
    opt.risk.validate();
    thread_count();  // surface a bad SETRISK_THREADS before any work
    std::vector<StrategySpec> strategies = opt.strategies;
    if (strategies.empty()) {
        strategies = default_strategies(p.kind());
        if (p.dim() != 2) std::erase_if(strategies, [](const StrategySpec& s) { return s.strategy == "ball-fan"; });
    }
    auto families = bundle_families(p, strategies, opt.risk);

    RiskBundle b;
    b.meta.portfolio = to_string(p.kind());
    b.meta.risk = opt.risk.name();
    b.meta.scenarios = p.ensemble().size();
    b.meta.dim = p.dim();
    for (const auto& f : families) {
        b.meta.families.push_back(f.name);
        b.meta.selections += f.count;
    }

    const auto& e = p.ensemble();
    if (p.dim() != 2) {
        b.inner_points = evaluate_vectors(e, families, opt.risk);
        auto d = dual_halfspaces(p, opt.risk, opt.directions);
        b.meta.outer_method = "dual-halfspaces";
        b.meta.directions_used = d.used;
        b.meta.directions_skipped = d.skipped;
        b.outer_set = std::move(d.set);
        return b;
    }

    const ConvexCone2D rec = inner_recession(p, opt.risk);
    auto pts = evaluate_families(e, families, opt.risk);
    b.inner = RiskRegion2D::from_points_plus_cone(pts, rec);
    b.marginal = marginalized_bound(e, rec, opt.risk);
    if (p.kind() == PortfolioKind::ConeHalfPlaneRandom && !opt.force_dual) {
        b.outer = random_halfplane_outer(e, opt.risk);
        b.meta.outer_method = "cone-sandwich";
    } else {
        auto d = dual_halfspaces(p, opt.risk, opt.directions);
        b.meta.outer_method = "dual-halfspaces";
        b.meta.directions_used = d.used;
        b.meta.directions_skipped = d.skipped;
        b.outer = RiskRegion2D::from_halfspaces(d.set);
    }
    return b;
}

std::pair<double, double> scalarize_bundle(const RiskBundle& b, std::span<const double> u)
{
    bool nonzero = false;
    for (double v : u) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("scalarization direction must be nonnegative");
        nonzero = nonzero || v > 0.0;
    }
    if (!nonzero) throw ValidationError("scalarization direction must be nonzero");
    if (b.inner && b.outer) {
        if (u.size() != 2) throw ValidationError("direction dimension differs from the bundle");
        Point2 uu{u[0], u[1]};
        return {b.inner->scalarize(uu), b.outer->scalarize(uu)};
    }
    if (!b.outer_set || b.inner_points.empty()) throw ValidationError("empty bundle");
    if (u.size() != b.outer_set->dim()) throw ValidationError("direction dimension differs from the bundle");
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& p : b.inner_points) {
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) s += p[j] * u[j];
        lo = std::min(lo, s);
    }
    return {lo, b.outer_set->scalarize(u)};
}

}  // namespace setrisk
