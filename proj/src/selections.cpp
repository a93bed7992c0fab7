#include "setrisk/selections.hpp"

#include "setrisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace setrisk {

namespace {

using EnsemblePtr = std::shared_ptr<const ScenarioEnsemble>;

void require_planar(const ScenarioEnsemble& e, const char* what)
{
    if (e.dim() != 2) throw ValidationError(std::string(what) + " needs two currencies");
}

void require_rates(const ScenarioEnsemble& e, const char* what)
{
    require_planar(e, what);
    if (!e.has_rates()) throw ValidationError(std::string(what) + " needs a rate column (pi)");
}

SelectionMatrix blank(const ScenarioEnsemble& e, std::string provenance)
{
    return {e.size(), e.dim(), e.gains(), std::move(provenance)};
}

std::string fmt_param(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double essinf(const ScenarioEnsemble& e, std::size_t j)
{
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e.weight(i) > 0.0) lo = std::min(lo, e.gain(i, j));
    return lo;
}

SelectionMatrix two_sided(const ScenarioEnsemble& e, const ShiftDirection& dir, double t, double s)
{
    SelectionMatrix m = blank(e, "two-sided(t=" + fmt_param(t) + ",s=" + fmt_param(s) + ")");
    for (std::size_t i = 0; i < e.size(); ++i) {
        double c = dir.ray[i] == 2 ? s : t;
        m.gains[2 * i] += c * dir.eta[i].x;
        m.gains[2 * i + 1] += c * dir.eta[i].y;
    }
    return m;
}

SelectionMatrix towards(const ScenarioEnsemble& e, const SelectionMatrix& base, double t)
{
    SelectionMatrix m = blank(e, base.provenance + "[t=" + fmt_param(t) + "]");
    for (std::size_t k = 0; k < m.gains.size(); ++k) m.gains[k] += t * (base.gains[k] - m.gains[k]);
    return m;
}

SelectionMatrix mix(const SelectionMatrix& a, const SelectionMatrix& b, double lambda)
{
    SelectionMatrix m{a.n, a.d, a.gains, "mix(" + a.provenance + "," + b.provenance + "," + fmt_param(lambda) + ")"};
    for (std::size_t k = 0; k < m.gains.size(); ++k) m.gains[k] = lambda * a.gains[k] + (1.0 - lambda) * b.gains[k];
    return m;
}

SelectionFamily single(std::string name, SelectionMatrix s)
{
    auto sp = std::make_shared<const SelectionMatrix>(std::move(s));
    return {std::move(name), 1, [sp](std::size_t) { return *sp; }};
}

SelectionFamily shift_family(std::string name, EnsemblePtr e, std::shared_ptr<const ShiftDirection> dir,
                             std::vector<double> t)
{
    std::size_t count = t.size();
    return {std::move(name), count, [e, dir, t = std::move(t)](std::size_t j) {
                return shift_selection(*e, dir->eta, t.at(j));
            }};
}

SelectionFamily two_sided_lazy(std::string name, EnsemblePtr e, std::shared_ptr<const ShiftDirection> dir,
                               std::vector<double> t)
{
    std::size_t m = t.size();
    return {std::move(name), m * m, [e, dir, t = std::move(t), m](std::size_t j) {
                return two_sided(*e, *dir, t.at(j / m), t.at(j % m));
            }};
}

SelectionFamily towards_family(std::string name, EnsemblePtr e, SelectionMatrix base, std::vector<double> t)
{
    auto bp = std::make_shared<const SelectionMatrix>(std::move(base));
    std::size_t count = t.size();
    return {std::move(name), count, [e, bp, t = std::move(t)](std::size_t j) { return towards(*e, *bp, t.at(j)); }};
}

SelectionFamily mix_family(std::string name, SelectionMatrix a, SelectionMatrix b, std::vector<double> lambdas)
{
    auto ap = std::make_shared<const SelectionMatrix>(std::move(a));
    auto bp = std::make_shared<const SelectionMatrix>(std::move(b));
    std::size_t count = lambdas.size();
    return {std::move(name), count, [ap, bp, l = std::move(lambdas)](std::size_t j) { return mix(*ap, *bp, l.at(j)); }};
}

// Per-scenario cones: the fixed one for cone-det, the scenario rate otherwise.
ShiftDirection quantile_shift_portfolio(const SetPortfolio& p, double alpha, RaySide side)
{
    const auto& e = p.ensemble();
    auto c0 = e.column(0), c1 = e.column(1);
    Point2 q{left_quantile(e.sample(c0), alpha), left_quantile(e.sample(c1), alpha)};
    ShiftDirection d;
    d.eta.resize(e.size());
    d.ray.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        std::tie(d.eta[i], d.ray[i]) = project_to_solvency_boundary(e.gain2(i) - q, p.scenario_cone(i), side);
    return d;
}

double shift_level(const RiskSpec& risk)
{
    return (risk.kind == RiskKind::ExpectedShortfall || risk.kind == RiskKind::ValueAtRisk) ? risk.level : 0.05;
}

}  // namespace

std::vector<double> SelectionMatrix::column(std::size_t j) const
{
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = gains[i * d + j];
    return c;
}

std::vector<double> StrategyGrid::geometric_t(double t_max, int count)
{
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
    if (count < 1) throw ValidationError("t grid needs at least one point");
    std::vector<double> t{0.0};
    const double lo = t_max * 1e-3;
    for (int k = 0; k < count; ++k)
        t.push_back(count == 1 ? t_max : lo * std::pow(1e3, double(k) / double(count - 1)));
    t.back() = t_max;
    return t;
}

std::vector<double> StrategyGrid::uniform_lambda(int count)
{
    if (count < 2) throw ValidationError("lambda grid needs at least two points");
    std::vector<double> l(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) l[std::size_t(k)] = double(k) / double(count - 1);
    return l;
}

void StrategyGrid::validate() const
{
    if (t_values.empty() || lambda_values.empty()) throw ValidationError("empty strategy grid");
    for (double t : t_values)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t grid values must be finite and nonnegative");
    for (double l : lambda_values)
        if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("lambda grid values must lie in [0,1]");
}

RaySide parse_ray_side(const std::string& s)
{
    for (auto r : {RaySide::Both, RaySide::Ray1, RaySide::Ray2})
        if (s == to_string(r)) return r;
    throw ValidationError("unknown ray side '" + s + "' (both, ray1, ray2)");
}

std::string to_string(RaySide s)
{
    switch (s) {
    case RaySide::Both: return "both";
    case RaySide::Ray1: return "ray1";
    case RaySide::Ray2: return "ray2";
    }
    return "?";
}

SelectionMatrix identity_selection(const ScenarioEnsemble& e) { return blank(e, "identity"); }

SelectionMatrix frictionless_projection(const ScenarioEnsemble& e)
{
    require_rates(e, "frictionless projection");
    SelectionMatrix m = blank(e, "frictionless");
    for (std::size_t i = 0; i < e.size(); ++i) {
        double pi = e.rate(i);
        double v = (pi * e.gain(i, 0) + e.gain(i, 1)) / (1.0 + pi * pi);
        m.gains[2 * i] = pi * v;
        m.gains[2 * i + 1] = v;
    }
    return m;
}

std::pair<Point2, int> project_to_solvency_boundary(Point2 y, const ExchangeCone2D& k, RaySide side)
{
    if (k.dual_contains(-1.0 * y, 0.0)) return {{0.0, 0.0}, 0};
    // boundary rays of the solvency cone
    Point2 r1 = std::isfinite(k.pi21()) ? normalized({-1.0, k.pi21()}) : Point2{0.0, 1.0};
    Point2 r2 = std::isfinite(k.pi12()) ? normalized({k.pi12(), -1.0}) : Point2{1.0, 0.0};
    Point2 p1 = std::max(dot(y, r1), 0.0) * r1;
    Point2 p2 = std::max(dot(y, r2), 0.0) * r2;
    int ray = side == RaySide::Ray1 ? 1 : side == RaySide::Ray2 ? 2 : (norm(y - p1) <= norm(y - p2) ? 1 : 2);
    Point2 p = ray == 1 ? p1 : p2;
    return {-1.0 * p, ray};
}

ShiftDirection quantile_shift_projection(const ScenarioEnsemble& e, const ExchangeCone2D& k, double alpha,
                                         RaySide side)
{
    require_planar(e, "quantile shift");
    auto c0 = e.column(0), c1 = e.column(1);
    Point2 q{left_quantile(e.sample(c0), alpha), left_quantile(e.sample(c1), alpha)};
    ShiftDirection d;
    d.eta.resize(e.size());
    d.ray.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        std::tie(d.eta[i], d.ray[i]) = project_to_solvency_boundary(e.gain2(i) - q, k, side);
    return d;
}

SelectionMatrix shift_selection(const ScenarioEnsemble& e, std::span<const Point2> eta, double t,
                                const std::string& provenance)
{
    require_planar(e, "shift");
    if (eta.size() != e.size()) throw ValidationError("shift direction length differs from the ensemble");
    SelectionMatrix m = blank(e, provenance + "(t=" + fmt_param(t) + ")");
    for (std::size_t i = 0; i < e.size(); ++i) {
        m.gains[2 * i] += t * eta[i].x;
        m.gains[2 * i + 1] += t * eta[i].y;
    }
    return m;
}

std::vector<SelectionMatrix> scaled_family(const ScenarioEnsemble& e, std::span<const Point2> eta,
                                           const StrategyGrid& grid)
{
    grid.validate();
    std::vector<SelectionMatrix> out;
    for (double t : grid.t_values) out.push_back(shift_selection(e, eta, t));
    return out;
}

std::vector<SelectionMatrix> scaled_family(const ScenarioEnsemble& e, const SelectionMatrix& base,
                                           const StrategyGrid& grid)
{
    grid.validate();
    if (base.n != e.size() || base.d != e.dim()) throw ValidationError("selection shape differs from the ensemble");
    std::vector<SelectionMatrix> out;
    for (double t : grid.t_values) out.push_back(towards(e, base, t));
    return out;
}

std::vector<SelectionMatrix> two_sided_family(const ScenarioEnsemble& e, const ShiftDirection& dir,
                                              const StrategyGrid& grid)
{
    grid.validate();
    require_planar(e, "two-sided shift");
    if (dir.eta.size() != e.size() || dir.ray.size() != e.size())
        throw ValidationError("shift direction length differs from the ensemble");
    std::vector<SelectionMatrix> out;
    for (double t : grid.t_values)
        for (double s : grid.t_values) out.push_back(two_sided(e, dir, t, s));
    return out;
}

SelectionMatrix liquidity_capped_projection(const ScenarioEnsemble& e, Point2 cap)
{
    require_rates(e, "liquidity projection");
    SelectionMatrix m = blank(e, "liquidity");
    for (std::size_t i = 0; i < e.size(); ++i) {
        double pi = e.rate(i);
        double delta = (e.gain(i, 0) - pi * e.gain(i, 1)) / (1.0 + pi * pi);
        delta = std::clamp(delta, -cap.x, cap.y / pi);
        m.gains[2 * i] -= delta;
        m.gains[2 * i + 1] += delta * pi;
    }
    return m;
}

std::pair<SelectionMatrix, SelectionMatrix> liquidity_corners(const ScenarioEnsemble& e, Point2 cap)
{
    require_rates(e, "liquidity corners");
    SelectionMatrix a = blank(e, "liquidity-corner-1"), b = blank(e, "liquidity-corner-2");
    for (std::size_t i = 0; i < e.size(); ++i) {
        double pi = e.rate(i);
        a.gains[2 * i] += cap.x;
        a.gains[2 * i + 1] -= cap.x * pi;
        b.gains[2 * i] -= cap.y / pi;
        b.gains[2 * i + 1] += cap.y;
    }
    return {std::move(a), std::move(b)};
}

std::pair<SelectionMatrix, SelectionMatrix> meetk_selections(const ScenarioEnsemble& e, const ExchangeCone2D& k)
{
    require_planar(e, "meet-K selection");
    if (!std::isfinite(k.pi12()) || !std::isfinite(k.pi21()))
        throw ValidationError("meet-K selections need finite exchange rates");
    const double m1 = essinf(e, 0), m2 = essinf(e, 1);
    SelectionMatrix s1 = blank(e, "meetk-1"), s2 = blank(e, "meetk-2");
    for (std::size_t i = 0; i < e.size(); ++i) {
        Point2 x = e.gain2(i);
        s1.gains[2 * i] = m1;
        s1.gains[2 * i + 1] = x.y + (x.x - m1) / k.pi12();
        s2.gains[2 * i] = x.x + (x.y - m2) / k.pi21();
        s2.gains[2 * i + 1] = m2;
    }
    return {std::move(s1), std::move(s2)};
}

std::pair<Point2, Point2> meetk_corner_points(const ScenarioEnsemble& e, const ExchangeCone2D& k,
                                              const RiskSpec& spec)
{
    auto [s1, s2] = meetk_selections(e, k);
    auto a = s1.column(1), b = s2.column(0);
    return {{-essinf(e, 0), risk_eval(spec, e.sample(a))}, {risk_eval(spec, e.sample(b)), -essinf(e, 1)}};
}

SelectionMatrix boost_worst_coordinate(const ScenarioEnsemble& e, double radius)
{
    if (!(radius >= 0.0)) throw ValidationError("radius must be nonnegative");
    SelectionMatrix m = blank(e, "ball-boost");
    const std::size_t d = e.dim();
    for (std::size_t i = 0; i < e.size(); ++i) {
        auto row = e.row(i);
        auto it = std::min_element(row.begin(), row.end());
        if (std::count(row.begin(), row.end(), *it) > 1) continue;
        m.gains[i * d + std::size_t(it - row.begin())] += radius;
    }
    return m;
}

SelectionMatrix ball_direction(const ScenarioEnsemble& e, double radius, Point2 dir)
{
    require_planar(e, "ball direction");
    if (norm(dir) == 0.0) throw ValidationError("zero direction");
    Point2 step = radius * normalized(dir);
    SelectionMatrix m = blank(e, "ball-dir(" + fmt_param(std::atan2(dir.y, dir.x)) + ")");
    for (std::size_t i = 0; i < e.size(); ++i) {
        m.gains[2 * i] += step.x;
        m.gains[2 * i + 1] += step.y;
    }
    return m;
}

SelectionMatrix axis_transfer(const ScenarioEnsemble& e, int currency)
{
    require_rates(e, "axis transfer");
    if (currency != 1 && currency != 2) throw ValidationError("currency must be 1 or 2");
    SelectionMatrix m = blank(e, currency == 1 ? "transfer-to-1" : "transfer-to-2");
    for (std::size_t i = 0; i < e.size(); ++i) {
        double pi = e.rate(i);
        Point2 x = e.gain2(i);
        if (currency == 1) {
            m.gains[2 * i] = x.x + x.y / pi;
            m.gains[2 * i + 1] = 0.0;
        } else {
            m.gains[2 * i] = 0.0;
            m.gains[2 * i + 1] = pi * x.x + x.y;
        }
    }
    return m;
}

std::vector<SelectionMatrix> convex_mix(const SelectionMatrix& a, const SelectionMatrix& b,
                                        std::span<const double> lambdas)
{
    if (a.n != b.n || a.d != b.d) throw ValidationError("cannot mix selections of different shape");
    std::vector<SelectionMatrix> out;
    for (double l : lambdas) {
        if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("mixing weight must lie in [0,1]");
        out.push_back(mix(a, b, l));
    }
    return out;
}

std::vector<SelectionMatrix> materialize(const SelectionFamily& f)
{
    std::vector<SelectionMatrix> out;
    out.reserve(f.count);
    for (std::size_t j = 0; j < f.count; ++j) out.push_back(f.make(j));
    return out;
}

std::vector<std::string> strategies_for(PortfolioKind k)
{
    switch (k) {
    case PortfolioKind::ConeDet: return {"identity", "quantile-shift", "quantile-shift-two-sided", "meetk"};
    case PortfolioKind::ConeHalfPlaneRandom:
        return {"identity", "frictionless", "axis-transfer", "quantile-shift"};
    case PortfolioKind::LiquidityCapped: return {"identity", "liquidity", "liquidity-corners"};
    case PortfolioKind::Ball: return {"identity", "ball-boost", "ball-fan"};
    case PortfolioKind::SegmentHull: return {"identity", "segment"};
    }
    return {};
}

std::vector<StrategySpec> default_strategies(PortfolioKind k)
{
    std::vector<StrategySpec> out;
    for (const auto& name : strategies_for(k)) {
        StrategySpec s;
        s.strategy = name;
        if (name == "quantile-shift" && k == PortfolioKind::ConeDet) {
            for (auto side : {RaySide::Both, RaySide::Ray1, RaySide::Ray2}) {
                s.side = side;
                out.push_back(s);
            }
            continue;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<SelectionFamily> make_families(const SetPortfolio& p, const StrategySpec& s, const RiskSpec& risk)
{
    auto allowed = strategies_for(p.kind());
    if (std::find(allowed.begin(), allowed.end(), s.strategy) == allowed.end())
        throw ValidationError("strategy '" + s.strategy + "' does not apply to a " + to_string(p.kind()) +
                              " portfolio");
    const StrategyGrid grid = s.grid();
    grid.validate();
    const EnsemblePtr e = p.ensemble_ptr();
    const auto& l = grid.lambda_values;
    std::vector<SelectionFamily> out;

    if (s.strategy == "identity") {
        out.push_back(single("identity", identity_selection(*e)));
    } else if (s.strategy == "quantile-shift") {
        auto dir = std::make_shared<const ShiftDirection>(quantile_shift_portfolio(p, shift_level(risk), s.side));
        out.push_back(shift_family("quantile-shift[" + to_string(s.side) + "]", e, dir, grid.t_values));
    } else if (s.strategy == "quantile-shift-two-sided") {
        auto dir = std::make_shared<const ShiftDirection>(quantile_shift_portfolio(p, shift_level(risk), RaySide::Both));
        out.push_back(two_sided_lazy("quantile-shift-two-sided", e, dir, grid.t_values));
    } else if (s.strategy == "meetk") {
        auto [s1, s2] = meetk_selections(*e, p.cone());
        out.push_back(mix_family("meetk", std::move(s1), std::move(s2), l));
    } else if (s.strategy == "frictionless") {
        // t = 1 is the projection itself
        auto t = grid.t_values;
        t.push_back(1.0);
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        out.push_back(towards_family("frictionless", e, frictionless_projection(*e), t));
    } else if (s.strategy == "axis-transfer") {
        out.push_back(mix_family("axis-transfer", axis_transfer(*e, 1), axis_transfer(*e, 2), l));
    } else if (s.strategy == "liquidity") {
        out.push_back(mix_family("liquidity", identity_selection(*e), liquidity_capped_projection(*e, p.cap()), l));
    } else if (s.strategy == "liquidity-corners") {
        auto [a, b] = liquidity_corners(*e, p.cap());
        auto star = liquidity_capped_projection(*e, p.cap());
        out.push_back(mix_family("liquidity-corners", a, b, l));
        out.push_back(mix_family("liquidity-corner-1", star, std::move(a), l));
        out.push_back(mix_family("liquidity-corner-2", std::move(star), std::move(b), l));
    } else if (s.strategy == "ball-boost") {
        out.push_back(mix_family("ball-boost", identity_selection(*e), boost_worst_coordinate(*e, p.radius()), l));
    } else if (s.strategy == "ball-fan") {
        if (e->dim() != 2) throw ValidationError("ball-fan needs two currencies");
        double r = p.radius();
        std::size_t count = l.size();
        out.push_back({"ball-fan", count, [e, r, l](std::size_t j) {
                           double a = std::numbers::pi / 2 * l.at(j);
                           return ball_direction(*e, r, {std::cos(a), std::sin(a)});
                       }});
    } else if (s.strategy == "segment") {
        for (std::size_t v = 1; v < p.vertex_count(); ++v) {
            SelectionMatrix other{e->size(), e->dim(), {}, "vertex-" + std::to_string(v)};
            other.gains.reserve(e->gains().size());
            for (std::size_t i = 0; i < e->size(); ++i) {
                auto row = p.vertex(v, i);
                other.gains.insert(other.gains.end(), row.begin(), row.end());
            }
            out.push_back(mix_family("segment-" + std::to_string(v), identity_selection(*e), std::move(other), l));
        }
    }
    return out;
}

AuditResult audit_selection(const SetPortfolio& p, const SelectionMatrix& s, int probes)
{
    const auto& e = p.ensemble();
    if (s.n != e.size() || s.d != e.dim()) throw ValidationError("selection shape differs from the ensemble");
    AuditResult r;
    r.worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.n; ++i) {
        auto xi = s.row(i);
        for (const auto& u : probe_directions(p, i, probes)) {
            double h = p.support(i, u);
            double v = 0.0;
            for (std::size_t j = 0; j < u.size(); ++j) v += xi[j] * u[j];
            double gap = v - h;
            if (gap > r.worst) {
                r.worst = gap;
                r.scenario = i;
            }
            double tol = 1e-9 * (1.0 + std::abs(v) + (std::isfinite(h) ? std::abs(h) : 0.0));
            if (gap > tol && r.ok) {
                r.ok = false;
                r.scenario = i;
            }
        }
    }
    if (!r.ok) {
        // report the first violating scenario with its own worst gap
        double w = -std::numeric_limits<double>::infinity();
        auto xi = s.row(r.scenario);
        for (const auto& u : probe_directions(p, r.scenario, probes)) {
            double v = 0.0;
            for (std::size_t j = 0; j < u.size(); ++j) v += xi[j] * u[j];
            w = std::max(w, v - p.support(r.scenario, u));
        }
        r.worst = w;
    }
    return r;
}

}  // namespace setrisk
