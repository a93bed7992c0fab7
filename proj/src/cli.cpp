#include "setrisk/cli.hpp"

#include "setrisk/bounds.hpp"
#include "setrisk/config.hpp"
#include "setrisk/errors.hpp"
#include "setrisk/json_io.hpp"
#include "setrisk/repro.hpp"
#include "setrisk/scenarios.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace setrisk {

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::string window;
};

RunConfig load_with(const Overrides& o)
{
    if (o.config.empty()) throw ValidationError("--config is required");
    auto c = load_config(o.config);
    if (!o.out.empty()) c.output = o.out;
    if (o.seed || o.n) {
        if (!c.generate) throw ValidationError("--seed and --n need a \"generate\" block in the config");
        if (o.seed) c.generate->seed = *o.seed;
        if (o.n) c.generate->n = *o.n;
    }
    if (!o.window.empty()) c.window = parse_window(o.window);
    c.validate();
    return c;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void summary(const ScenarioEnsemble& e, std::ostream& out)
{
    const std::size_t n = e.size(), d = e.dim();
    out << "scenarios " << n << ", dimension " << d << "\n";
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += e.weight(i) * e.gain(i, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) sd[j] += e.weight(i) * std::pow(e.gain(i, j) - mean[j], 2);
    for (std::size_t j = 0; j < d; ++j)
        out << "x" << j + 1 << ": mean " << num(mean[j]) << ", sd " << num(std::sqrt(sd[j])) << "\n";
    if (d == 2) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += e.weight(i) * (e.gain(i, 0) - mean[0]) * (e.gain(i, 1) - mean[1]);
        out << "correlation " << num(c / std::sqrt(sd[0] * sd[1])) << "\n";
    }
    if (e.has_rates()) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += e.weight(i) * e.rate(i);
        out << "pi: mean " << num(m) << "\n";
    }
}

int cmd_gen(const Overrides& o, std::ostream& out)
{
    auto c = load_with(o);
    if (!c.generate) throw ValidationError("gen needs a \"generate\" block in the config");
    auto e = generate(*c.generate);
    std::filesystem::create_directories(c.output);
    const std::string path = c.output + "/scenarios.csv";
    write_csv(e, path);
    out << "wrote " << path << "\n";
    summary(e, out);
    return 0;
}

int cmd_risk(const Overrides& o, std::ostream& out, std::ostream& err)
{
    auto c = load_with(o);
    auto t0 = std::chrono::steady_clock::now();
    auto b = run_config(c);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto j = bundle_to_json(b);
    std::filesystem::create_directories(c.output);
    std::optional<Box> w;
    if (b.inner) {
        w = c.window ? *c.window : default_window(b);
        j["meta"]["window"] = window_diagnostics(b, *w);
    }
    const std::string path = c.output + "/bundle.json";
    write_text_file(path, dump_json(j));
    out << "wrote " << path << "\n";
    if (b.inner && c.boundary_csv) {
        write_boundary_csv(*b.inner, *w, c.output + "/inner.csv");
        write_boundary_csv(*b.outer, *w, c.output + "/outer.csv");
        write_boundary_csv(*b.marginal, *w, c.output + "/marginal.csv");
        out << "wrote " << c.output << "/{inner,outer,marginal}.csv\n";
    }
    out << b.meta.portfolio << ", " << b.meta.risk << ", " << b.meta.scenarios << " scenarios, "
        << b.meta.selections << " selections\n";
    err << "risk: " << num(secs) << " s\n";
    return 0;
}

int cmd_scalarize(const std::string& bundle, const std::string& u_text, std::ostream& out)
{
    std::vector<double> u;
    std::stringstream ss(u_text);
    std::string f;
    while (std::getline(ss, f, ',')) {
        try {
            std::size_t used = 0;
            u.push_back(std::stod(f, &used));
            if (used != f.size()) throw std::invalid_argument(f);
        } catch (const std::exception&) {
            throw ValidationError("--u field '" + f + "' is not a number");
        }
    }
    auto b = bundle_from_json(read_json_file(bundle));
    auto [inner, outer] = scalarize_bundle(b, u);
    char buf[64];
    std::snprintf(buf, sizeof buf, "inner %.12g\nouter %.12g\n", inner, outer);
    out << buf;
    return 0;
}

int cmd_repro(const std::string& id, const Overrides& o, std::ostream& out, std::ostream& err)
{
    ReproOptions opt;
    opt.n = o.n;
    opt.seed = o.seed;
    std::vector<std::string> ids = id == "all" ? repro_ids() : std::vector<std::string>{id};
    bool ok = true;
    for (const auto& i : ids) {
        auto r = run_repro(i, opt);
        print_report(r, out);
        err << "repro " << i << ": " << num(r.seconds) << " s\n";
        if (!o.out.empty()) write_report_files(r, o.out);
        ok = ok && r.ok();
    }
    return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Set-valued risk of multi-currency portfolios: inner and outer bounds."};
    app.footer(
        "Environment:\n"
        "  SETRISK_THREADS   worker threads for selection and direction evaluation\n"
        "                    (default: hardware concurrency); output does not depend on it\n\n"
        "Exit codes: 0 success, 1 acceptance failure, 2 config or IO error, 3 modeling pathology");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Overrides o;
    auto common = [&](CLI::App* s, bool data) {
        s->add_option("--config", o.config, "Run config (JSON)")->check(CLI::ExistingFile);
        s->add_option("--out", o.out, "Output directory");
        if (data) s->add_option("--window", o.window, "Diagnostics window x0,y0,x1,y1");
        s->add_option("--seed", o.seed, "Override the generation seed");
        s->add_option("--n", o.n, "Override the number of scenarios");
    };
    auto* gen = app.add_subcommand("gen", "Generate scenarios into <out>/scenarios.csv");
    common(gen, false);
    auto* risk = app.add_subcommand("risk", "Compute the risk bundle into <out>/bundle.json");
    common(risk, true);
    std::string bundle, u;
    auto* scal = app.add_subcommand("scalarize", "Inner and outer scalarizations of a bundle");
    scal->add_option("--bundle", bundle, "Bundle JSON")->required()->check(CLI::ExistingFile);
    scal->add_option("--u", u, "Direction u1,u2[,...] with nonnegative entries")->required();
    std::string id;
    auto* rep = app.add_subcommand("repro", "Reproduce a worked example and compare with reference values");
    rep->add_option("id", id, "intro | nonmargin | normcone | frictionless | liquidity | ball | all")->required();
    rep->add_option("--out", o.out, "Write bundles and boundary CSVs here");
    rep->add_option("--seed", o.seed, "Override the Monte Carlo seed");
    rep->add_option("--n", o.n, "Override the Monte Carlo sample size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream so, se;
        int code = app.exit(e, so, se);
        out << so.str();
        err << se.str();
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) return cmd_gen(o, out);
        if (*risk) return cmd_risk(o, out, err);
        if (*scal) return cmd_scalarize(bundle, u, out);
        if (*rep) return cmd_repro(id, o, out, err);
    } catch (const ModelingError& e) {
        err << "modeling error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace setrisk
