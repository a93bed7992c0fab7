#include <doctest.h>

#include "setrisk/errors.hpp"
#include "setrisk/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace setrisk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "setrisk_test_scenarios";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& s)
{
    std::ofstream(p) << s;
}

std::string error_of(const std::string& body)
{
    auto p = scratch("bad.csv");
    write_text(p, body);
    try {
        read_csv(p.string());
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

}  // namespace

TEST_CASE("generation is deterministic")
{
    GenSpec s;
    s.n = 2000;
    s.seed = 42;
    s.rate = LognormalRateSpec{1.5, 0.4};
    auto a = generate(s), b = generate(s);
    CHECK(a.gains() == b.gains());
    CHECK(a.rates() == b.rates());
    CHECK(a.uniform_weights());
    s.seed = 43;
    CHECK(generate(s).gains() != a.gains());
    // the gains stream does not depend on whether rates are drawn
    s.seed = 42;
    s.rate.reset();
    auto c = generate(s);
    CHECK(c.gains() == a.gains());
    CHECK_FALSE(c.has_rates());
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("generated moments")
{
    const std::size_t n = 1'000'000;
    GenSpec s;
    s.n = n;
    s.seed = 7;
    s.gains.mean = {0.5, -0.25};
    s.gains.variances = {1.0, 4.0};
    s.gains.correlation = 0.6;
    s.rate = LognormalRateSpec{1.0, 0.4};
    auto e = generate(s);
    auto x1 = e.column(0), x2 = e.column(1);
    const double rn = std::sqrt(double(n));
    CHECK(std::abs(mean(x1) - 0.5) < 4.0 / rn);
    CHECK(std::abs(mean(x2) + 0.25) < 4.0 * 2.0 / rn);
    double m1 = mean(x1), m2 = mean(x2), c = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        c += (x1[i] - m1) * (x2[i] - m2);
        v1 += (x1[i] - m1) * (x1[i] - m1);
        v2 += (x2[i] - m2) * (x2[i] - m2);
    }
    double rho = c / std::sqrt(v1 * v2);
    CHECK(std::abs(rho - 0.6) < 4.0 * (1 - 0.36) / rn);
    CHECK(std::abs(v2 / double(n) - 4.0) < 4.0 * 4.0 * std::sqrt(2.0) / rn);

    const auto& pi = e.rates();
    double sd = std::sqrt(std::exp(0.16) - 1.0);
    CHECK(std::abs(mean(pi) - 1.0) < 4.0 * sd / rn);
    for (double v : pi) REQUIRE(v > 0.0);
}

TEST_CASE("generation spec validation")
{
    GenSpec s;
    s.gains.correlation = 1.0;
    CHECK_THROWS_AS(generate(s), ValidationError);
    s.gains.correlation = 0.0;
    s.gains.variances = {1.0, 0.0};
    CHECK_THROWS_AS(generate(s), ValidationError);
    s.gains.variances = {1.0, 1.0};
    s.n = 0;
    CHECK_THROWS_AS(generate(s), ValidationError);
    s.n = 5;
    s.rate = LognormalRateSpec{0.0, 0.4};
    CHECK_THROWS_AS(generate(s), ValidationError);
    s.rate = LognormalRateSpec{1.0, -0.1};
    CHECK_THROWS_AS(generate(s), ValidationError);
    s.rate.reset();
    s.gains.mean = {1.0};
    CHECK_THROWS_AS(generate(s), ValidationError);
}

TEST_CASE("csv round trip")
{
    auto p = scratch("rt.csv");
    ScenarioEnsemble e(2, {0.1, -2.5, 1.0 / 3.0, 4e-7, -1e6, 7}, std::vector<double>{1.5, 0.25, 3},
                       std::vector<double>{0.2, 0.3, 0.5});
    write_csv(e, p.string());
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x1,x2,pi,w");
    auto r = read_csv(p.string());
    REQUIRE(r.size() == 3);
    REQUIRE(r.has_rates());
    CHECK_FALSE(r.uniform_weights());
    for (std::size_t i = 0; i < 6; ++i) CHECK(r.gains()[i] == doctest::Approx(e.gains()[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.rate(i) == doctest::Approx(e.rate(i)).epsilon(1e-12));
        CHECK(r.weight(i) == doctest::Approx(e.weight(i)).epsilon(1e-12));
    }
    // writing again reproduces the same file
    auto p2 = scratch("rt2.csv");
    write_csv(r, p2.string());
    std::stringstream a, b;
    a << std::ifstream(p).rdbuf();
    b << std::ifstream(p2).rdbuf();
    CHECK(a.str() == b.str());

    write_text(p, "x1,x2,x3\n1,2,3\n4,5,6\n");
    auto u = read_csv(p.string());
    CHECK(u.dim() == 3);
    CHECK(u.uniform_weights());
    CHECK_FALSE(u.has_rates());
    // trailing whitespace and CRLF endings are tolerated
    write_text(p, "x1,x2\r\n1,2\r\n 3 , 4\r\n");
    CHECK(read_csv(p.string()).gains() == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("csv diagnostics carry line numbers")
{
    CHECK(error_of("a,b\n1,2\n").find("line 1") != std::string::npos);
    CHECK(error_of("x1,x2\n1,2\n3\n").find("line 3") != std::string::npos);
    CHECK(error_of("x1,x2\n1,2\n3,abc\n").find("line 3") != std::string::npos);
    CHECK(error_of("x1,x2,pi\n1,2,1\n3,4,0\n").find("line 3") != std::string::npos);
    CHECK(error_of("x1,x2,w\n1,2,1.5\n3,4,-0.5\n").find("line 3") != std::string::npos);
    CHECK(error_of("x1,x2,w\n1,2,0.5\n3,4,0.4\n").find("sum") != std::string::npos);
    CHECK(error_of("x1,x2\n").find("no scenarios") != std::string::npos);
    CHECK(error_of("").find("line 1") != std::string::npos);
    CHECK(error_of("x1,x2,w,pi\n1,2,1,1\n").find("line 1") != std::string::npos);
    CHECK(error_of("x1,x2\n1,nan\n").find("line 2") != std::string::npos);
    CHECK_THROWS_AS(read_csv("/nonexistent/dir/file.csv"), IoError);
    ScenarioEnsemble e(2, {1, 2});
    CHECK_THROWS_AS(write_csv(e, "/nonexistent/dir/file.csv"), IoError);
}
