#pragma once

#include "setrisk/bounds.hpp"
#include "setrisk/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace setrisk {

struct ReproCheck {
    enum class Mode { Near, AtMost, Info };

    std::string name;
    double computed = 0.0;
    double expected = 0.0;
    double tol = 0.0;
    Mode mode = Mode::Near;

    bool pass() const;
};

struct ReproBundle {
    std::string name;
    RiskBundle bundle;
    std::optional<RunConfig> config;
};

struct ReproReport {
    std::string id;
    std::vector<ReproCheck> checks;
    std::vector<ReproBundle> bundles;
    double seconds = 0.0;

    // every gated check passes
    bool ok() const;
};

// Overrides for the Monte Carlo parts; the defaults are the pinned values.
struct ReproOptions {
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
};

// intro, nonmargin, normcone, frictionless, liquidity, ball
const std::vector<std::string>& repro_ids();
// Pinned run config behind the example's bundle.
RunConfig repro_config(const std::string& id);
ReproReport run_repro(const std::string& id, const ReproOptions& opt = {});

void print_report(const ReproReport& r, std::ostream& out);
// <dir>/<id>_<name>.json, boundary CSVs per region and the pinned config.
void write_report_files(const ReproReport& r, const std::string& dir);

}  // namespace setrisk
