#pragma once

#include "setrisk/markets.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace setrisk {

struct BivariateNormalModel {
    std::vector<double> mean{0.0, 0.0};
    std::vector<double> variances{1.0, 1.0};
    double correlation = 0.0;
};

// pi = mean * exp(sigma Z - sigma^2 / 2)
struct LognormalRateSpec {
    double mean = 1.0;
    double sigma = 0.4;
};

struct GenSpec {
    BivariateNormalModel gains;
    std::optional<LognormalRateSpec> rate;
    std::size_t n = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

// Gains come from one mt19937_64 stream seeded with `seed`, rates from a
// second stream seeded with splitmix64(seed).
ScenarioEnsemble generate(const GenSpec& spec);

std::uint64_t splitmix64(std::uint64_t x);

// Header x1..xd, then optional pi and w columns.
ScenarioEnsemble read_csv(const std::string& path);
void write_csv(const ScenarioEnsemble& e, const std::string& path);

}  // namespace setrisk
