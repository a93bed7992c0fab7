#pragma once

#include <span>
#include <string>
#include <vector>

namespace setrisk {

// Non-owning view of a weighted sample. `uniform` promises equal weights,
// in which case `weights` may be empty.
struct SampleView {
    std::span<const double> values;
    std::span<const double> weights;
    bool uniform = true;

    std::size_t size() const { return values.size(); }
    double weight(std::size_t i) const { return uniform ? 1.0 / double(values.size()) : weights[i]; }
};

class WeightedSample {
public:
    // Validates and renormalizes weights (sum must be within 1e-9 of one).
    WeightedSample(std::vector<double> values, std::vector<double> weights);
    static WeightedSample uniform(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::span<const double> weights() const { return weights_; }
    bool is_uniform() const { return uniform_; }
    std::size_t size() const { return values_.size(); }
    SampleView view() const { return {values_, weights_, uniform_}; }
    operator SampleView() const { return view(); }

private:
    WeightedSample() = default;
    std::vector<double> values_;
    std::vector<double> weights_;
    bool uniform_ = true;
};

// Checks weights and returns them renormalized; sets `uniform` when all equal.
std::vector<double> normalize_weights(std::vector<double> w, bool& uniform);

enum class RiskKind { ExpectedShortfall, ValueAtRisk, NegExpectation, NegEssinf };

struct RiskSpec {
    RiskKind kind = RiskKind::ExpectedShortfall;
    double level = 0.05;

    static RiskSpec es(double alpha) { return {RiskKind::ExpectedShortfall, alpha}; }
    static RiskSpec var(double alpha) { return {RiskKind::ValueAtRisk, alpha}; }
    static RiskSpec neg_expectation() { return {RiskKind::NegExpectation, 0.5}; }
    static RiskSpec neg_essinf() { return {RiskKind::NegEssinf, 0.5}; }

    void validate() const;
    std::string name() const;
};

RiskKind parse_risk_kind(const std::string& s);
std::string to_string(RiskKind k);

// Left-continuous empirical quantile inf{x : F(x) >= alpha}.
double left_quantile(SampleView s, double alpha);
double es_empirical(SampleView s, double alpha);
double var_empirical(SampleView s, double alpha);
double risk_eval(const RiskSpec& spec, SampleView s);

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

double es_normal(double mu, double sigma, double alpha);

struct LognormalTail {
    double es_pi;
    double es_inv_pi;
    double var_lo;
    double var_hi;
};

// pi = exp(sigma Z - sigma^2/2), so E pi = 1.
LognormalTail es_var_lognormal_mean_one(double sigma, double alpha);

}  // namespace setrisk
