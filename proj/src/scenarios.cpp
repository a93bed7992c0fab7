#include "setrisk/scenarios.hpp"

#include "setrisk/errors.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace setrisk {

namespace {

std::string at_line(std::size_t line, const std::string& msg)
{
    return "line " + std::to_string(line) + ": " + msg;
}

std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) return out;
        start = comma + 1;
    }
}

double parse_number(const std::string& field, std::size_t line)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size() || field.empty())
        throw ValidationError(at_line(line, "'" + field + "' is not a number"));
    if (!std::isfinite(v)) throw ValidationError(at_line(line, "non-finite value '" + field + "'"));
    return v;
}

void put(std::string& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void GenSpec::validate() const
{
    if (n < 1) throw ValidationError("scenario count must be at least 1");
    if (gains.mean.size() != 2 || gains.variances.size() != 2)
        throw ValidationError("bivariate normal needs two means and two variances");
    for (double m : gains.mean)
        if (!std::isfinite(m)) throw ValidationError("means must be finite");
    for (double v : gains.variances)
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("variances must be positive");
    if (!(std::abs(gains.correlation) < 1.0)) throw ValidationError("correlation must lie strictly inside (-1,1)");
    if (rate) {
        if (!(rate->mean > 0.0) || !std::isfinite(rate->mean)) throw ValidationError("rate mean must be positive");
        if (!(rate->sigma >= 0.0) || !std::isfinite(rate->sigma))
            throw ValidationError("rate volatility must be nonnegative");
    }
}

ScenarioEnsemble generate(const GenSpec& spec)
{
    spec.validate();
    boost::random::mt19937_64 gx(spec.seed);
    boost::random::normal_distribution<double> z;
    const double s1 = std::sqrt(spec.gains.variances[0]), s2 = std::sqrt(spec.gains.variances[1]);
    const double rho = spec.gains.correlation, rc = std::sqrt(1.0 - rho * rho);
    std::vector<double> g(2 * spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double z1 = z(gx), z2 = z(gx);
        g[2 * i] = spec.gains.mean[0] + s1 * z1;
        g[2 * i + 1] = spec.gains.mean[1] + s2 * (rho * z1 + rc * z2);
    }
    std::optional<std::vector<double>> rates;
    if (spec.rate) {
        boost::random::mt19937_64 gr(splitmix64(spec.seed));
        boost::random::normal_distribution<double> zr;
        const double sig = spec.rate->sigma;
        rates.emplace(spec.n);
        for (double& r : *rates) r = spec.rate->mean * std::exp(sig * zr(gr) - 0.5 * sig * sig);
    }
    return ScenarioEnsemble(2, std::move(g), std::move(rates));
}

ScenarioEnsemble read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(at_line(1, "missing header in '" + path + "'"));
    auto header = split(line);
    std::size_t d = 0;
    while (d < header.size() && header[d] == "x" + std::to_string(d + 1)) ++d;
    if (d == 0) throw ValidationError(at_line(1, "header must start with x1"));
    bool has_pi = false, has_w = false;
    std::size_t k = d;
    if (k < header.size() && header[k] == "pi") {
        has_pi = true;
        ++k;
    }
    if (k < header.size() && header[k] == "w") {
        has_w = true;
        ++k;
    }
    if (k != header.size())
        throw ValidationError(at_line(1, "unexpected column '" + header[k] + "' (expected x1..xd[,pi][,w])"));

    std::vector<double> gains, rates, weights;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto f = split(line);
        if (f.size() != header.size())
            throw ValidationError(at_line(lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                                                      std::to_string(f.size())));
        for (std::size_t j = 0; j < d; ++j) gains.push_back(parse_number(f[j], lineno));
        std::size_t c = d;
        if (has_pi) {
            double pi = parse_number(f[c++], lineno);
            if (!(pi > 0.0)) throw ValidationError(at_line(lineno, "rate pi must be positive"));
            rates.push_back(pi);
        }
        if (has_w) {
            double w = parse_number(f[c], lineno);
            if (w < 0.0) throw ValidationError(at_line(lineno, "weight must be nonnegative"));
            weights.push_back(w);
        }
    }
    if (gains.empty()) throw ValidationError("'" + path + "' has no scenarios");
    std::optional<std::vector<double>> r, w;
    if (has_pi) r = std::move(rates);
    if (has_w) w = std::move(weights);
    try {
        return ScenarioEnsemble(d, std::move(gains), std::move(r), std::move(w));
    } catch (const ValidationError& e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

void write_csv(const ScenarioEnsemble& e, const std::string& path)
{
    std::string out;
    for (std::size_t j = 0; j < e.dim(); ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
    if (e.has_rates()) out += ",pi";
    const bool weighted = !e.uniform_weights();
    if (weighted) out += ",w";
    out += '\n';
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < e.dim(); ++j) {
            if (j) out += ',';
            put(out, e.gain(i, j));
        }
        if (e.has_rates()) {
            out += ',';
            put(out, e.rate(i));
        }
        if (weighted) {
            out += ',';
            put(out, e.weight(i));
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << out;
    if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace setrisk
