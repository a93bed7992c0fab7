#include <doctest.h>

#include "setrisk/config.hpp"
#include "setrisk/errors.hpp"
#include "setrisk/repro.hpp"

#include <filesystem>
#include <fstream>

using namespace setrisk;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) { return parse_config(json::parse(text)); }

std::string error_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

const std::string kGen = R"("generate":{"n":20,"seed":3})";

}  // namespace

TEST_CASE("minimal configs")
{
    auto c = parse(R"({"alpha":0.1,"portfolio":{"kind":"cone-det","pi12":2,"pi21":1.5},)" + kGen + "}");
    CHECK(c.risk.kind == RiskKind::ExpectedShortfall);
    CHECK(c.risk.level == 0.1);
    CHECK(c.portfolio.pi12 == 2);
    CHECK(c.directions == 181);
    REQUIRE(c.generate);
    CHECK(c.generate->n == 20);
    CHECK(c.generate->seed == 3);
    CHECK(c.output == "out");
    CHECK(c.boundary_csv);

    auto inf = parse(R"({"portfolio":{"kind":"cone-det","pi12":null,"pi21":2},)" + kGen + "}");
    CHECK(std::isinf(inf.portfolio.pi12));
    CHECK(config_to_json(inf)["portfolio"]["pi12"].is_null());

    auto v = parse(R"({"risk":{"kind":"value-at-risk","level":0.2},"portfolio":{"kind":"ball","radius":2},)" + kGen +
                   "}");
    CHECK(v.risk.kind == RiskKind::ValueAtRisk);
    CHECK(v.portfolio.radius == 2);
    auto ne = parse(R"({"risk":{"kind":"neg-expectation"},"portfolio":{"kind":"liquidity-capped","cap":[0.5,2]},)" +
                    kGen + "}");
    CHECK(ne.portfolio.cap == Point2{0.5, 2});

    auto s = parse(R"({"portfolio":{"kind":"cone-det","pi12":5,"pi21":5},
        "strategies":[{"strategy":"quantile-shift","side":"ray2","t_grid":{"t_max":8,"count":5},"lambda_grid":{"count":3}}],
        "scenarios":{"points":[[-2,4],[4,-2]],"weights":[0.5,0.5]},"window":[-3,-3,3,3],"boundary_csv":false})");
    REQUIRE(s.strategies.size() == 1);
    CHECK(s.strategies[0].side == RaySide::Ray2);
    CHECK(s.strategies[0].t_max == 8);
    CHECK(s.strategies[0].t_count == 5);
    CHECK(s.strategies[0].lambda_count == 3);
    CHECK(s.window->x1 == 3);
    CHECK_FALSE(s.boundary_csv);
    auto e = load_ensemble(s);
    CHECK(e.size() == 2);
    CHECK(e.uniform_weights());
}

TEST_CASE("config errors")
{
    const std::string cone = R"("portfolio":{"kind":"cone-det","pi12":2,"pi21":2})";
    CHECK(error_of("{" + cone + "}").find("exactly one") != std::string::npos);
    CHECK(error_of("{" + cone + "," + kGen + R"(,"input":"x.csv"})").find("exactly one") != std::string::npos);
    CHECK(error_of("{" + kGen + "}").find("portfolio") != std::string::npos);
    CHECK(error_of("{" + cone + "," + kGen + R"(,"alpah":0.1})").find("alpah") != std::string::npos);
    CHECK(error_of("{" + cone + "," + kGen + R"(,"alpha":1.5})") != "");
    CHECK(error_of("{" + cone + "," + kGen + R"(,"alpha":0.1,"risk":{"kind":"es","level":0.1}})") != "");
    CHECK(error_of(R"({"portfolio":{"kind":"cone-det","pi12":0.5,"pi21":1},)" + kGen + "}").find("arbitrage") !=
          std::string::npos);
    CHECK(error_of(R"({"portfolio":{"kind":"cone-det","pi12":2},)" + kGen + "}") != "");
    CHECK(error_of(R"({"portfolio":{"kind":"cone-det","pi12":2,"pi21":2,"cap":[1,1]},)" + kGen + "}") != "");
    CHECK(error_of(R"({"portfolio":{"kind":"torus"},)" + kGen + "}").find("torus") != std::string::npos);
    // a random half-plane needs a source of rates
    CHECK(error_of(R"({"portfolio":{"kind":"cone-halfplane-random"},)" + kGen + "}").find("rate") !=
          std::string::npos);
    CHECK(error_of(R"({"portfolio":{"kind":"cone-halfplane-random"},"scenarios":{"points":[[1,2]]}})") != "");
    CHECK(error_of(R"({"risk":{"kind":"var","level":0.1},"portfolio":{"kind":"cone-halfplane-random"},
        "generate":{"rate":{}}})") != "");
    CHECK(error_of(R"({"alpha":0.6,"portfolio":{"kind":"cone-halfplane-random"},"generate":{"rate":{}}})") != "");
    // strategies must fit the kind
    CHECK(error_of("{" + cone + "," + kGen + R"(,"strategies":[{"strategy":"ball-boost"}]})").find("ball-boost") !=
          std::string::npos);
    CHECK(error_of("{" + cone + "," + kGen + R"(,"strategies":[{"strategy":"meetk","side":"ray1"}]})") != "");
    CHECK(error_of("{" + cone + "," + kGen + R"(,"strategies":[{"strategy":"meetk","t_grid":{"count":0}}]})") != "");
    CHECK(error_of("{" + cone + "," + kGen + R"(,"strategies":[{"strategy":"quantile-shift","side":"up"}]})") != "");
    CHECK(error_of("{" + cone + "," + kGen + R"(,"directions":1})") != "");
    CHECK(error_of("{" + cone + "," + kGen + R"(,"window":[1,1,0,2]})") != "");
    CHECK(error_of("{" + cone + "," + kGen + R"(,"outer":"exact"})") != "");
    CHECK(error_of("{" + cone + R"(,"generate":{"n":0}})") != "");
    CHECK(error_of("{" + cone + R"(,"generate":{"seed":-1}})") != "");
    CHECK(error_of("{" + cone + R"(,"generate":{"correlation":1}})") != "");
    CHECK(error_of("{" + cone + R"(,"scenarios":{"points":[[1,2],[1]]}})") != "");
    CHECK(error_of("{" + cone + R"(,"scenarios":{"points":[[1,2]],"weights":[0.5,0.5]}})") != "");
    CHECK(error_of(R"({"portfolio":{"kind":"segment-hull","vertices":[{"scale":2,"shift":[1,1]}]},)" + kGen + "}") !=
          "");
    CHECK(error_of(R"({"portfolio":{"kind":"segment-hull","vertices":[]},)" + kGen + "}") != "");

    auto dir = fs::temp_directory_path() / "setrisk_test_config";
    fs::create_directories(dir);
    std::ofstream(dir / "broken.json") << R"({"alpha": })";
    CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ValidationError);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
    std::ofstream(dir / "typed.json") << R"({"alpha":"x","portfolio":{"kind":"ball"},"generate":{}})";
    try {
        load_config((dir / "typed.json").string());
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("typed.json") != std::string::npos);
    }
}

TEST_CASE("window parsing")
{
    auto b = parse_window("-1,-2.5,3,4e0");
    CHECK(b.x0 == -1);
    CHECK(b.y0 == -2.5);
    CHECK(b.y1 == 4);
    CHECK_THROWS_AS(parse_window("1,2,3"), ValidationError);
    CHECK_THROWS_AS(parse_window("0,0,1,x"), ValidationError);
    CHECK_THROWS_AS(parse_window("0,0,1,1z"), ValidationError);
    CHECK_THROWS_AS(parse_window("1,0,0,1"), ValidationError);
    CHECK_THROWS_AS(parse_window("0,0,inf,1"), ValidationError);
}

TEST_CASE("portfolios from configs")
{
    auto dir = fs::temp_directory_path() / "setrisk_test_config";
    fs::create_directories(dir);
    std::ofstream(dir / "other.csv") << "x1,x2\n1,1\n2,2\n";
    std::ofstream(dir / "seg.json") << R"({"alpha":0.5,"portfolio":{"kind":"segment-hull","vertices":[
        {"shift":[1,-1]},{"scale":0.5},{"csv":"other.csv"}]},"scenarios":{"points":[[0,0],[4,-2]]}})";
    auto c = load_config((dir / "seg.json").string());
    CHECK(*c.portfolio.vertices[2].csv == (dir / "other.csv").string());
    auto e = std::make_shared<const ScenarioEnsemble>(load_ensemble(c));
    auto p = build_portfolio(c, e);
    CHECK(p.vertex_count() == 4);
    CHECK(p.vertex(1, 1)[0] == 5);
    CHECK(p.vertex(1, 1)[1] == -3);
    CHECK(p.vertex(2, 1)[0] == 2);
    CHECK(p.vertex(3, 1)[1] == 2);

    std::ofstream(dir / "short.csv") << "x1,x2\n1,1\n";
    std::ofstream(dir / "seg2.json") << R"({"portfolio":{"kind":"segment-hull","vertices":[{"csv":"short.csv"}]},
        "scenarios":{"points":[[0,0],[4,-2]]}})";
    auto c2 = load_config((dir / "seg2.json").string());
    CHECK_THROWS_AS(build_portfolio(c2, std::make_shared<const ScenarioEnsemble>(load_ensemble(c2))),
                    ValidationError);

    std::ofstream(dir / "norates.csv") << "x1,x2\n1,1\n2,2\n";
    std::ofstream(dir / "hp.json") << R"({"portfolio":{"kind":"cone-halfplane-random"},"input":"norates.csv"})";
    auto c3 = load_config((dir / "hp.json").string());
    CHECK_THROWS_AS(run_config(c3), ValidationError);
}

TEST_CASE("json form round trips")
{
    for (const auto& id : repro_ids()) {
        auto c = repro_config(id);
        auto j = config_to_json(c);
        auto back = parse_config(j);
        CHECK(config_to_json(back) == j);
    }
}

TEST_CASE("sample configs match the pinned ones")
{
    for (const auto& id : repro_ids()) {
        CAPTURE(id);
        auto path = std::string(SETRISK_SOURCE_DIR) + "/configs/" + id + ".json";
        auto c = load_config(path);
        CHECK(config_to_json(c) == config_to_json(repro_config(id)));
    }
}
