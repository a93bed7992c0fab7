#include "setrisk/config.hpp"

#include "setrisk/errors.hpp"
#include "setrisk/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

namespace setrisk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rejects keys outside `allowed` so typos do not pass silently.
void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!ok) throw ValidationError(where + ": unknown key \"" + it.key() + "\"");
    }
}

double number(const json& j, const std::string& what)
{
    if (!j.is_number()) throw ValidationError(what + " must be a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(what + " must be finite");
    return v;
}

int integer(const json& j, const std::string& what)
{
    if (!j.is_number_integer()) throw ValidationError(what + " must be an integer");
    auto v = j.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ValidationError(what + " is out of range");
    return int(v);
}

std::vector<double> numbers(const json& j, const std::string& what)
{
    if (!j.is_array()) throw ValidationError(what + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& x : j) v.push_back(number(x, what));
    return v;
}

// null means an infinite rate (no exchange in that direction)
double rate(const json& j, const std::string& what)
{
    if (j.is_null()) return kInf;
    return number(j, what);
}

json rate_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string resolve(const std::string& base, const std::string& p)
{
    fs::path path(p);
    if (path.is_absolute() || base.empty()) return p;
    return (fs::path(base) / path).lexically_normal().string();
}

RiskSpec parse_risk(const json& j)
{
    only_keys(j, "risk", {"kind", "level"});
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ValidationError("risk needs a \"kind\" string");
    RiskSpec r;
    r.kind = parse_risk_kind(j.at("kind").get<std::string>());
    if (j.contains("level")) r.level = number(j.at("level"), "risk level");
    else if (r.kind == RiskKind::ExpectedShortfall || r.kind == RiskKind::ValueAtRisk)
        throw ValidationError("risk \"" + to_string(r.kind) + "\" needs a \"level\"");
    return r;
}

PortfolioSpec parse_portfolio(const json& j, const std::string& base)
{
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ValidationError("portfolio needs a \"kind\" string");
    PortfolioSpec p;
    p.kind = parse_portfolio_kind(j.at("kind").get<std::string>());
    switch (p.kind) {
    case PortfolioKind::ConeDet:
        only_keys(j, "portfolio", {"kind", "pi12", "pi21"});
        if (!j.contains("pi12") || !j.contains("pi21"))
            throw ValidationError("cone-det portfolio needs \"pi12\" and \"pi21\"");
        p.pi12 = rate(j.at("pi12"), "pi12");
        p.pi21 = rate(j.at("pi21"), "pi21");
        break;
    case PortfolioKind::ConeHalfPlaneRandom:
        only_keys(j, "portfolio", {"kind"});
        break;
    case PortfolioKind::LiquidityCapped: {
        only_keys(j, "portfolio", {"kind", "cap"});
        if (j.contains("cap")) {
            auto c = numbers(j.at("cap"), "cap");
            if (c.size() != 2) throw ValidationError("cap must hold two numbers");
            p.cap = {c[0], c[1]};
        }
        break;
    }
    case PortfolioKind::Ball:
        only_keys(j, "portfolio", {"kind", "radius"});
        if (j.contains("radius")) p.radius = number(j.at("radius"), "radius");
        break;
    case PortfolioKind::SegmentHull:
        only_keys(j, "portfolio", {"kind", "vertices"});
        if (!j.contains("vertices") || !j.at("vertices").is_array() || j.at("vertices").empty())
            throw ValidationError("segment-hull portfolio needs a nonempty \"vertices\" array");
        for (const auto& v : j.at("vertices")) {
            only_keys(v, "vertex", {"shift", "scale", "csv"});
            if (v.size() != 1) throw ValidationError("each vertex takes exactly one of shift, scale, csv");
            VertexSpec s;
            if (v.contains("shift")) s.shift = numbers(v.at("shift"), "vertex shift");
            if (v.contains("scale")) s.scale = number(v.at("scale"), "vertex scale");
            if (v.contains("csv")) {
                if (!v.at("csv").is_string()) throw ValidationError("vertex csv must be a path");
                s.csv = resolve(base, v.at("csv").get<std::string>());
            }
            p.vertices.push_back(std::move(s));
        }
        break;
    }
    return p;
}

StrategySpec parse_strategy(const json& j)
{
    only_keys(j, "strategy", {"strategy", "side", "t_grid", "lambda_grid"});
    if (!j.contains("strategy") || !j.at("strategy").is_string())
        throw ValidationError("strategy block needs a \"strategy\" string");
    StrategySpec s;
    s.strategy = j.at("strategy").get<std::string>();
    if (j.contains("side")) {
        if (!j.at("side").is_string()) throw ValidationError("side must be a string");
        s.side = parse_ray_side(j.at("side").get<std::string>());
    }
    if (j.contains("t_grid")) {
        const auto& t = j.at("t_grid");
        only_keys(t, "t_grid", {"t_max", "count"});
        if (t.contains("t_max")) s.t_max = number(t.at("t_max"), "t_max");
        if (t.contains("count")) s.t_count = integer(t.at("count"), "t_grid count");
    }
    if (j.contains("lambda_grid")) {
        const auto& l = j.at("lambda_grid");
        only_keys(l, "lambda_grid", {"count"});
        if (l.contains("count")) s.lambda_count = integer(l.at("count"), "lambda_grid count");
    }
    return s;
}

GenSpec parse_generate(const json& j)
{
    only_keys(j, "generate", {"n", "seed", "mean", "variances", "correlation", "rate"});
    GenSpec g;
    if (j.contains("n")) {
        if (!j.at("n").is_number_unsigned()) throw ValidationError("n must be a positive integer");
        g.n = j.at("n").get<std::size_t>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed must be a nonnegative integer");
        g.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("mean")) g.gains.mean = numbers(j.at("mean"), "mean");
    if (j.contains("variances")) g.gains.variances = numbers(j.at("variances"), "variances");
    if (j.contains("correlation")) g.gains.correlation = number(j.at("correlation"), "correlation");
    if (j.contains("rate")) {
        const auto& r = j.at("rate");
        only_keys(r, "rate", {"mean", "sigma"});
        LognormalRateSpec s;
        if (r.contains("mean")) s.mean = number(r.at("mean"), "rate mean");
        if (r.contains("sigma")) s.sigma = number(r.at("sigma"), "rate sigma");
        g.rate = s;
    }
    return g;
}

InlineScenarios parse_inline(const json& j)
{
    only_keys(j, "scenarios", {"points", "rates", "weights"});
    if (!j.contains("points") || !j.at("points").is_array() || j.at("points").empty())
        throw ValidationError("scenarios need a nonempty \"points\" array");
    InlineScenarios s;
    for (const auto& p : j.at("points")) s.points.push_back(numbers(p, "scenario point"));
    if (j.contains("rates")) s.rates = numbers(j.at("rates"), "rates");
    if (j.contains("weights")) s.weights = numbers(j.at("weights"), "weights");
    return s;
}

}  // namespace

void RunConfig::validate() const
{
    risk.validate();
    const int sources = int(generate.has_value()) + int(input.has_value()) + int(scenarios.has_value());
    if (sources != 1) throw ValidationError("config needs exactly one of \"generate\", \"input\", \"scenarios\"");
    if (generate) generate->validate();
    if (scenarios) {
        const std::size_t d = scenarios->points.front().size();
        if (d < 2) throw ValidationError("scenario points need at least two coordinates");
        for (const auto& p : scenarios->points)
            if (p.size() != d) throw ValidationError("scenario points differ in dimension");
        if (scenarios->rates && scenarios->rates->size() != scenarios->points.size())
            throw ValidationError("one rate per scenario point is required");
        if (scenarios->weights && scenarios->weights->size() != scenarios->points.size())
            throw ValidationError("one weight per scenario point is required");
    }

    const auto& p = portfolio;
    switch (p.kind) {
    case PortfolioKind::ConeDet:
        ExchangeCone2D::bid_ask(p.pi12, p.pi21);
        break;
    case PortfolioKind::ConeHalfPlaneRandom:
        if (generate && !generate->rate) throw ValidationError("cone-halfplane-random needs \"generate.rate\"");
        if (scenarios && !scenarios->rates) throw ValidationError("cone-halfplane-random needs \"scenarios.rates\"");
        if (risk.kind != RiskKind::ExpectedShortfall)
            throw ValidationError("cone-halfplane-random bounds need expected shortfall");
        if (risk.level > 0.5) throw ValidationError("cone-halfplane-random needs level <= 1/2");
        break;
    case PortfolioKind::LiquidityCapped:
        if (!(p.cap.x >= 0.0) || !(p.cap.y >= 0.0)) throw ValidationError("cap must be nonnegative");
        break;
    case PortfolioKind::Ball:
        if (!(p.radius >= 0.0)) throw ValidationError("radius must be nonnegative");
        break;
    case PortfolioKind::SegmentHull:
        for (const auto& v : p.vertices)
            if (v.scale && !(*v.scale >= 0.0)) throw ValidationError("vertex scale must be nonnegative");
        break;
    }

    const auto allowed = strategies_for(p.kind);
    for (const auto& s : strategies) {
        if (std::find(allowed.begin(), allowed.end(), s.strategy) == allowed.end())
            throw ValidationError("strategy \"" + s.strategy + "\" does not apply to " + to_string(p.kind));
        if (s.side != RaySide::Both && s.strategy != "quantile-shift")
            throw ValidationError("\"side\" applies to quantile-shift only");
        s.grid().validate();
    }
    if (directions < 2) throw ValidationError("directions must be at least 2");
    if (window && !window->valid()) throw ValidationError("window must have x0 < x1 and y0 < y1");
    if (output.empty()) throw ValidationError("output path is empty");
}

BundleOptions RunConfig::bundle_options() const
{
    BundleOptions o;
    o.risk = risk;
    o.strategies = strategies;
    o.directions = directions;
    o.force_dual = force_dual;
    return o;
}

RunConfig parse_config(const json& j, const std::string& base_dir)
{
    only_keys(j, "config", {"alpha", "risk", "portfolio", "strategies", "directions", "outer", "generate", "input",
                            "scenarios", "output", "window", "boundary_csv"});
    RunConfig c;
    if (j.contains("alpha") && j.contains("risk")) throw ValidationError("give either \"alpha\" or \"risk\", not both");
    if (j.contains("alpha")) c.risk = RiskSpec::es(number(j.at("alpha"), "alpha"));
    if (j.contains("risk")) c.risk = parse_risk(j.at("risk"));
    if (!j.contains("portfolio")) throw ValidationError("config needs a \"portfolio\" block");
    c.portfolio = parse_portfolio(j.at("portfolio"), base_dir);
    if (j.contains("strategies")) {
        if (!j.at("strategies").is_array()) throw ValidationError("strategies must be an array");
        for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s));
    }
    if (j.contains("directions")) c.directions = integer(j.at("directions"), "directions");
    if (j.contains("outer")) {
        const auto& o = j.at("outer");
        if (!o.is_string() || (o != "auto" && o != "dual-halfspaces"))
            throw ValidationError("outer must be \"auto\" or \"dual-halfspaces\"");
        c.force_dual = o == "dual-halfspaces";
    }
    if (j.contains("generate")) c.generate = parse_generate(j.at("generate"));
    if (j.contains("input")) {
        if (!j.at("input").is_string()) throw ValidationError("input must be a path");
        c.input = resolve(base_dir, j.at("input").get<std::string>());
    }
    if (j.contains("scenarios")) c.scenarios = parse_inline(j.at("scenarios"));
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ValidationError("output must be a path");
        c.output = j.at("output").get<std::string>();
    }
    if (j.contains("window")) {
        auto w = numbers(j.at("window"), "window");
        if (w.size() != 4) throw ValidationError("window must hold x0,y0,x1,y1");
        c.window = Box{w[0], w[1], w[2], w[3]};
    }
    if (j.contains("boundary_csv")) {
        if (!j.at("boundary_csv").is_boolean()) throw ValidationError("boundary_csv must be true or false");
        c.boundary_csv = j.at("boundary_csv").get<bool>();
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    auto j = read_json_file(path);
    try {
        return parse_config(j, fs::path(path).parent_path().string());
    } catch (const ValidationError& e) {
        throw ValidationError("'" + path + "': " + e.what());
    } catch (const json::exception& e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

json config_to_json(const RunConfig& c)
{
    json j;
    j["risk"] = {{"kind", to_string(c.risk.kind)}, {"level", c.risk.level}};
    const auto& p = c.portfolio;
    json pj = {{"kind", to_string(p.kind)}};
    switch (p.kind) {
    case PortfolioKind::ConeDet:
        pj["pi12"] = rate_json(p.pi12);
        pj["pi21"] = rate_json(p.pi21);
        break;
    case PortfolioKind::ConeHalfPlaneRandom: break;
    case PortfolioKind::LiquidityCapped: pj["cap"] = {p.cap.x, p.cap.y}; break;
    case PortfolioKind::Ball: pj["radius"] = p.radius; break;
    case PortfolioKind::SegmentHull: {
        json vs = json::array();
        for (const auto& v : p.vertices) {
            if (v.shift) vs.push_back({{"shift", *v.shift}});
            else if (v.scale) vs.push_back({{"scale", *v.scale}});
            else vs.push_back({{"csv", *v.csv}});
        }
        pj["vertices"] = vs;
        break;
    }
    }
    j["portfolio"] = pj;
    if (!c.strategies.empty()) {
        json ss = json::array();
        for (const auto& s : c.strategies) {
            json sj = {{"strategy", s.strategy},
                       {"t_grid", {{"t_max", s.t_max}, {"count", s.t_count}}},
                       {"lambda_grid", {{"count", s.lambda_count}}}};
            if (s.strategy == "quantile-shift") sj["side"] = to_string(s.side);
            ss.push_back(sj);
        }
        j["strategies"] = ss;
    }
    j["directions"] = c.directions;
    j["outer"] = c.force_dual ? "dual-halfspaces" : "auto";
    if (c.generate) {
        const auto& g = *c.generate;
        json gj = {{"n", g.n},
                   {"seed", g.seed},
                   {"mean", g.gains.mean},
                   {"variances", g.gains.variances},
                   {"correlation", g.gains.correlation}};
        if (g.rate) gj["rate"] = {{"mean", g.rate->mean}, {"sigma", g.rate->sigma}};
        j["generate"] = gj;
    }
    if (c.input) j["input"] = *c.input;
    if (c.scenarios) {
        json sj = {{"points", c.scenarios->points}};
        if (c.scenarios->rates) sj["rates"] = *c.scenarios->rates;
        if (c.scenarios->weights) sj["weights"] = *c.scenarios->weights;
        j["scenarios"] = sj;
    }
    j["output"] = c.output;
    if (c.window) j["window"] = {c.window->x0, c.window->y0, c.window->x1, c.window->y1};
    j["boundary_csv"] = c.boundary_csv;
    return j;
}

ScenarioEnsemble load_ensemble(const RunConfig& c)
{
    if (c.generate) return generate(*c.generate);
    if (c.input) return read_csv(*c.input);
    if (!c.scenarios) throw ValidationError("config has no data source");
    const auto& s = *c.scenarios;
    const std::size_t d = s.points.front().size();
    std::vector<double> g;
    g.reserve(d * s.points.size());
    for (const auto& p : s.points) g.insert(g.end(), p.begin(), p.end());
    return ScenarioEnsemble(d, std::move(g), s.rates, s.weights);
}

SetPortfolio build_portfolio(const RunConfig& c, std::shared_ptr<const ScenarioEnsemble> e)
{
    const auto& p = c.portfolio;
    switch (p.kind) {
    case PortfolioKind::ConeDet: return SetPortfolio::cone_det(e, ExchangeCone2D::bid_ask(p.pi12, p.pi21));
    case PortfolioKind::ConeHalfPlaneRandom: return SetPortfolio::cone_halfplane_random(e);
    case PortfolioKind::LiquidityCapped: return SetPortfolio::liquidity_capped(e, p.cap);
    case PortfolioKind::Ball: return SetPortfolio::ball(e, p.radius);
    case PortfolioKind::SegmentHull: {
        std::vector<std::vector<double>> others;
        const std::size_t d = e->dim();
        for (const auto& v : p.vertices) {
            std::vector<double> g = e->gains();
            if (v.shift) {
                if (v.shift->size() != d) throw ValidationError("vertex shift has the wrong dimension");
                for (std::size_t k = 0; k < g.size(); ++k) g[k] += (*v.shift)[k % d];
            } else if (v.scale) {
                for (double& x : g) x *= *v.scale;
            } else {
                auto o = read_csv(*v.csv);
                if (o.dim() != d || o.size() != e->size())
                    throw ValidationError("vertex file '" + *v.csv + "' does not match the scenario shape");
                g = o.gains();
            }
            others.push_back(std::move(g));
        }
        return SetPortfolio::segment_hull(e, std::move(others));
    }
    }
    throw ValidationError("unknown portfolio kind");
}

RiskBundle run_config(const RunConfig& c)
{
    c.validate();
    auto e = std::make_shared<const ScenarioEnsemble>(load_ensemble(c));
    return compute_bundle(build_portfolio(c, e), c.bundle_options());
}

Box parse_window(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(f, &used));
            if (used != f.size()) throw std::invalid_argument(f);
        } catch (const std::exception&) {
            throw ValidationError("window field '" + f + "' is not a number");
        }
    }
    if (v.size() != 4) throw ValidationError("window must be x0,y0,x1,y1");
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError("window values must be finite");
    Box b{v[0], v[1], v[2], v[3]};
    if (!b.valid()) throw ValidationError("window must have x0 < x1 and y0 < y1");
    return b;
}

}  // namespace setrisk
