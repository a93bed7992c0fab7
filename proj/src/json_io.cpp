#include "setrisk/json_io.hpp"

#include "setrisk/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace setrisk {

using nlohmann::json;

namespace {

json pt(Point2 p) { return json::array({round_sig(p.x), round_sig(p.y)}); }

json vec(std::span<const double> v)
{
    json a = json::array();
    for (double x : v) a.push_back(round_sig(x));
    return a;
}

Point2 to_point(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(std::string(what) + " must be a pair of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> to_vector(const json& j, const char* what)
{
    if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + " must be a nonempty array");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw ValidationError(std::string(what) + " must hold numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

json strings(const std::vector<std::string>& s)
{
    json a = json::array();
    for (const auto& x : s) a.push_back(x);
    return a;
}

}  // namespace

double round_sig(double v, int digits)
{
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

json region_to_json(const RiskRegion2D& r)
{
    json v = json::array();
    for (const auto& p : r.vertices()) v.push_back(pt(p));
    json rec = json::array();
    if (!r.is_whole_plane()) {
        rec.push_back(pt(r.recession().lo()));
        rec.push_back(pt(r.recession().hi()));
    }
    return {{"vertices", v}, {"recession", rec}};
}

RiskRegion2D region_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("vertices") || !j.contains("recession"))
        throw ValidationError("region needs \"vertices\" and \"recession\"");
    const auto& rec = j.at("recession");
    if (!rec.is_array() || (rec.size() != 0 && rec.size() != 2))
        throw ValidationError("region recession must hold zero or two rays");
    if (rec.empty()) return RiskRegion2D::whole_plane();
    std::vector<Point2> v;
    for (const auto& p : j.at("vertices")) v.push_back(to_point(p, "vertex"));
    if (v.empty()) throw ValidationError("region with a recession cone needs a vertex");
    auto cone = ConvexCone2D::from_rays(to_point(rec[0], "recession ray"), to_point(rec[1], "recession ray"));
    return RiskRegion2D::from_points_plus_cone(v, cone);
}

json bundle_to_json(const RiskBundle& b)
{
    json out;
    if (b.inner) {
        out["inner"] = region_to_json(*b.inner);
    } else {
        json pts = json::array();
        for (const auto& p : b.inner_points) pts.push_back(vec(p));
        out["inner"] = {{"points", pts}};
    }
    if (b.outer) {
        out["outer"] = region_to_json(*b.outer);
    } else if (b.outer_set) {
        json hs = json::array();
        for (const auto& h : b.outer_set->constraints())
            hs.push_back({{"normal", vec(h.normal)}, {"offset", round_sig(h.offset)}});
        out["outer"] = {{"dim", b.outer_set->dim()}, {"halfspaces", hs}};
    }
    if (b.marginal) out["marginal"] = region_to_json(*b.marginal);
    const auto& m = b.meta;
    out["meta"] = {{"portfolio", m.portfolio},
                   {"risk", m.risk},
                   {"scenarios", m.scenarios},
                   {"dim", m.dim},
                   {"families", strings(m.families)},
                   {"selections", m.selections},
                   {"outer_method", m.outer_method},
                   {"directions_used", m.directions_used},
                   {"directions_skipped", m.directions_skipped}};
    return out;
}

RiskBundle bundle_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("inner") || !j.contains("outer"))
        throw ValidationError("bundle needs \"inner\" and \"outer\"");
    RiskBundle b;
    const auto& in = j.at("inner");
    if (in.contains("points")) {
        for (const auto& p : in.at("points")) b.inner_points.push_back(to_vector(p, "inner point"));
    } else {
        b.inner = region_from_json(in);
    }
    const auto& out = j.at("outer");
    if (out.contains("halfspaces")) {
        if (!out.contains("dim") || !out.at("dim").is_number_unsigned())
            throw ValidationError("half-space outer bound needs \"dim\"");
        HalfSpaceSet h(out.at("dim").get<std::size_t>());
        for (const auto& c : out.at("halfspaces")) {
            auto n = to_vector(c.at("normal"), "half-space normal");
            if (n.size() != h.dim()) throw ValidationError("half-space normal has the wrong dimension");
            if (!c.at("offset").is_number()) throw ValidationError("half-space offset must be a number");
            h.add(n, c.at("offset").get<double>());
        }
        b.outer_set = std::move(h);
    } else {
        b.outer = region_from_json(out);
    }
    if (j.contains("marginal")) b.marginal = region_from_json(j.at("marginal"));
    if (j.contains("meta") && j.at("meta").is_object()) {
        const auto& m = j.at("meta");
        b.meta.portfolio = m.value("portfolio", "");
        b.meta.risk = m.value("risk", "");
        b.meta.scenarios = m.value("scenarios", std::size_t{0});
        b.meta.dim = m.value("dim", std::size_t{0});
        b.meta.selections = m.value("selections", std::size_t{0});
        b.meta.outer_method = m.value("outer_method", "");
        b.meta.directions_used = m.value("directions_used", std::size_t{0});
        b.meta.directions_skipped = m.value("directions_skipped", std::size_t{0});
        if (m.contains("families")) b.meta.families = m.at("families").get<std::vector<std::string>>();
    }
    if ((b.inner && !b.outer) || (!b.inner && !b.outer_set))
        throw ValidationError("bundle mixes planar and half-space forms");
    return b;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw IoError("failed writing '" + path + "'");
}

Box default_window(const RiskBundle& b)
{
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool any = false;
    auto take = [&](const std::optional<RiskRegion2D>& r) {
        if (!r) return;
        for (const auto& p : r->vertices()) {
            if (!any) {
                x0 = x1 = p.x;
                y0 = y1 = p.y;
                any = true;
            }
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    };
    take(b.inner);
    take(b.outer);
    take(b.marginal);
    return {x0 - 1.0, y0 - 1.0, x1 + 1.0, y1 + 1.0};
}

std::vector<Point2> boundary_polyline(const RiskRegion2D& r, const Box& w)
{
    if (r.is_whole_plane() || r.vertices().empty()) return {};
    // long enough to leave the window from any vertex
    const double reach = 2.0 * std::hypot(w.x1 - w.x0, w.y1 - w.y0) +
                         std::max({std::abs(w.x0), std::abs(w.x1), std::abs(w.y0), std::abs(w.y1)});
    const auto& v = r.vertices();
    std::vector<Point2> out;
    out.push_back(v.front() + r.recession().lo() * reach);
    out.insert(out.end(), v.begin(), v.end());
    out.push_back(v.back() + r.recession().hi() * reach);
    return out;
}

json window_diagnostics(const RiskBundle& b, const Box& w)
{
    auto h = [&](const std::optional<RiskRegion2D>& a, const std::optional<RiskRegion2D>& c) -> json {
        if (!a || !c) return nullptr;
        try {
            return round_sig(hausdorff_on_window(*a, *c, w));
        } catch (const ValidationError&) {
            return nullptr;
        }
    };
    return {{"box", {round_sig(w.x0), round_sig(w.y0), round_sig(w.x1), round_sig(w.y1)}},
            {"hausdorff_inner_outer", h(b.inner, b.outer)},
            {"hausdorff_marginal_inner", h(b.marginal, b.inner)}};
}

void write_boundary_csv(const RiskRegion2D& r, const Box& window, const std::string& path)
{
    std::string s = "x,y\n";
    char buf[64];
    for (const auto& p : boundary_polyline(r, window)) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.x, p.y);
        s += buf;
    }
    write_text_file(path, s);
}

}  // namespace setrisk
