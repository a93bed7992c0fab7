#pragma once

#include "setrisk/bounds.hpp"
#include "setrisk/geom2d.hpp"

#include <json.hpp>

#include <string>

namespace setrisk {

// v rounded to `digits` significant digits.
double round_sig(double v, int digits = 12);

// {"vertices":[[x,y],...],"recession":[lo,hi]}; the plane has "recession":[]
nlohmann::json region_to_json(const RiskRegion2D& r);
RiskRegion2D region_from_json(const nlohmann::json& j);

// {"inner":..,"outer":..,"marginal":..,"meta":{..}}
nlohmann::json bundle_to_json(const RiskBundle& b);
RiskBundle bundle_from_json(const nlohmann::json& j);

// Two-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Window around every vertex of the bundle, padded by one unit.
Box default_window(const RiskBundle& b);
// Boundary polyline: a point far out on the lo ray, the vertices, a point far
// out on the hi ray. CSV columns x,y.
std::vector<Point2> boundary_polyline(const RiskRegion2D& r, const Box& window);
// {"box":[..],"hausdorff_inner_outer":h,"hausdorff_marginal_inner":h}; null
// where a region misses the window.
nlohmann::json window_diagnostics(const RiskBundle& b, const Box& window);
void write_boundary_csv(const RiskRegion2D& r, const Box& window, const std::string& path);

}  // namespace setrisk
