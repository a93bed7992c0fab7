#include "setrisk/riskstats.hpp"

#include "setrisk/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace setrisk {

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("risk level must lie strictly inside (0,1), got " + std::to_string(alpha));
}

void check_sample(SampleView s)
{
    if (s.values.empty()) throw ValidationError("empty sample");
    if (!s.uniform && s.weights.size() != s.values.size())
        throw ValidationError("weights and values differ in length");
}

// (value, weight) pairs sorted lexicographically. Sorting on both keys makes
// every downstream sum independent of the input order.
std::vector<std::pair<double, double>> sorted_pairs(SampleView s)
{
    std::vector<std::pair<double, double>> p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) p[i] = {s.values[i], s.weight(i)};
    std::sort(p.begin(), p.end());
    return p;
}

// alpha*n split into whole atoms and the fractional remainder.
std::pair<std::size_t, double> atom_split(double alpha, std::size_t n)
{
    double full = alpha * double(n);
    double k = std::floor(full + 1e-9);
    double frac = full - k;
    if (frac < 0.0) frac = 0.0;
    return {std::min<std::size_t>(std::size_t(k), n), frac};
}

}  // namespace

std::vector<double> normalize_weights(std::vector<double> w, bool& uniform)
{
    if (w.empty()) throw ValidationError("empty weight vector");
    for (double v : w)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("weights must be finite and nonnegative");
    // summed in sorted order so the normalized weights do not depend on the
    // scenario order
    std::vector<double> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("weights sum to " + std::to_string(sum) + ", not 1");
    for (double& v : w) v /= sum;
    uniform = std::all_of(w.begin(), w.end(), [&](double v) { return v == w[0]; });
    return w;
}

WeightedSample::WeightedSample(std::vector<double> values, std::vector<double> weights)
{
    if (values.empty()) throw ValidationError("empty sample");
    if (values.size() != weights.size()) throw ValidationError("weights and values differ in length");
    weights_ = normalize_weights(std::move(weights), uniform_);
    values_ = std::move(values);
    if (uniform_) weights_.clear();
}

WeightedSample WeightedSample::uniform(std::vector<double> values)
{
    if (values.empty()) throw ValidationError("empty sample");
    WeightedSample s;
    s.values_ = std::move(values);
    s.uniform_ = true;
    return s;
}

void RiskSpec::validate() const
{
    if (kind == RiskKind::ExpectedShortfall || kind == RiskKind::ValueAtRisk) check_alpha(level);
}

std::string to_string(RiskKind k)
{
    switch (k) {
    case RiskKind::ExpectedShortfall: return "expected-shortfall";
    case RiskKind::ValueAtRisk: return "value-at-risk";
    case RiskKind::NegExpectation: return "neg-expectation";
    case RiskKind::NegEssinf: return "neg-essinf";
    }
    return "?";
}

RiskKind parse_risk_kind(const std::string& s)
{
    for (auto k : {RiskKind::ExpectedShortfall, RiskKind::ValueAtRisk, RiskKind::NegExpectation,
                   RiskKind::NegEssinf})
        if (s == to_string(k)) return k;
    if (s == "es") return RiskKind::ExpectedShortfall;
    if (s == "var") return RiskKind::ValueAtRisk;
    throw ValidationError("unknown risk kind '" + s + "'");
}

std::string RiskSpec::name() const
{
    if (kind == RiskKind::ExpectedShortfall || kind == RiskKind::ValueAtRisk)
        return to_string(kind) + "@" + std::to_string(level);
    return to_string(kind);
}

double left_quantile(SampleView s, double alpha)
{
    check_alpha(alpha);
    check_sample(s);
    const std::size_t n = s.size();
    if (s.uniform) {
        double full = alpha * double(n);
        std::size_t j = std::size_t(std::ceil(full - 1e-9));
        j = std::clamp<std::size_t>(j, 1, n) - 1;
        std::vector<double> v(s.values.begin(), s.values.end());
        std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(j), v.end());
        return v[j];
    }
    auto p = sorted_pairs(s);
    double F = 0.0;
    for (const auto& [x, w] : p) {
        F += w;
        if (w > 0.0 && F >= alpha - 1e-12) return x;
    }
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        if (it->second > 0.0) return it->first;
    return p.back().first;
}

double var_empirical(SampleView s, double alpha) { return -left_quantile(s, alpha); }

double es_empirical(SampleView s, double alpha)
{
    check_alpha(alpha);
    check_sample(s);
    const std::size_t n = s.size();
    if (s.uniform) {
        auto [k, frac] = atom_split(alpha, n);
        std::size_t m = std::min(n, k + 1);
        std::vector<double> v(s.values.begin(), s.values.end());
        if (m < n) std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(m - 1), v.end());
        std::sort(v.begin(), v.begin() + std::ptrdiff_t(m));
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += v[i];
        if (k < n && frac > 0.0) sum += frac * v[k];
        return -sum / (alpha * double(n));
    }
    auto p = sorted_pairs(s);
    double remaining = alpha;
    double sum = 0.0;
    for (const auto& [x, w] : p) {
        double take = std::min(w, remaining);
        sum += take * x;
        remaining -= take;
        if (remaining <= 0.0) break;
    }
    return -sum / alpha;
}

double risk_eval(const RiskSpec& spec, SampleView s)
{
    spec.validate();
    check_sample(s);
    switch (spec.kind) {
    case RiskKind::ExpectedShortfall: return es_empirical(s, spec.level);
    case RiskKind::ValueAtRisk: return var_empirical(s, spec.level);
    case RiskKind::NegExpectation: {
        auto p = sorted_pairs(s);
        double sum = 0.0;
        for (const auto& [x, w] : p) sum += w * x;
        return -sum;
    }
    case RiskKind::NegEssinf: {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.weight(i) > 0.0) lo = std::min(lo, s.values[i]);
        return -lo;
    }
    }
    throw ValidationError("unknown risk kind");
}

double normal_pdf(double x) { return boost::math::pdf(boost::math::normal(), x); }
double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }
double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double es_normal(double mu, double sigma, double alpha)
{
    check_alpha(alpha);
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    return -mu + sigma * normal_pdf(normal_quantile(alpha)) / alpha;
}

LognormalTail es_var_lognormal_mean_one(double sigma, double alpha)
{
    check_alpha(alpha);
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    const double za = normal_quantile(alpha);
    const double zb = normal_quantile(1.0 - alpha);
    LognormalTail t{};
    t.es_pi = -normal_cdf(za - sigma) / alpha;
    t.es_inv_pi = -std::exp(sigma * sigma) * normal_cdf(za - sigma) / alpha;
    t.var_lo = -std::exp(-0.5 * sigma * sigma + sigma * za);
    t.var_hi = -std::exp(-0.5 * sigma * sigma + sigma * zb);
    return t;
}

}  // namespace setrisk
