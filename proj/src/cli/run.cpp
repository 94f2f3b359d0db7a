#include "sgcov/cli.hpp"

#include "sgcov/numerics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace sgcov::cli {

using nlohmann::json;

namespace {

HetNetParams scaled_tiers(const HetNetParams& base, double g)
{
    HetNetParams p = base;
    for (TierSpec& t : p.tiers) t.tau *= g;
    return p;
}

CoverageCurve analytic_curve(const RunConfig& cfg, const std::vector<double>& grid)
{
    CoverageCurve curve;
    curve.thresholds = grid;
    DownlinkParams dl = cfg.downlink;
    if (cfg.scenario == Scenario::downlink && cfg.shadow_db) {
        // Shadowing acts as a displaced PPP of higher density.
        dl.lambda = shadowing_equivalent_density(dl.lambda, dl.alpha, LognormalShadowing{*cfg.shadow_db});
    }
    for (double g : grid) {
        double c = 0.0;
        switch (cfg.scenario) {
        case Scenario::downlink: c = coverage_general(g, dl); break;
        case Scenario::uplink: c = uplink_coverage(g, cfg.uplink); break;
        case Scenario::hetnet: {
            const HetNetParams p = scaled_tiers(cfg.hetnet, g);
            c = cfg.hetnet.rule == AssociationRule::average_power ? hetnet_coverage_avg(p) : hetnet_coverage_inst(p);
            break;
        }
        }
        curve.coverage.push_back(c);
    }
    return curve;
}

CoverageEstimate empirical_curve(const RunConfig& cfg, const std::vector<double>& grid, double& radius)
{
    SimConfig sim = cfg.sim;
    sim.threshold_grid = grid;
    switch (cfg.scenario) {
    case Scenario::downlink: {
        std::optional<Shadowing> sh;
        if (cfg.shadow_db) sh = LognormalShadowing{*cfg.shadow_db};
        DownlinkSimulator s(cfg.downlink, sim, sh);
        radius = s.window_radius();
        return s.run();
    }
    case Scenario::uplink: {
        UplinkSimulator s(cfg.uplink, cfg.resolved_lambda_u(), sim);
        radius = s.window_radius();
        return s.run();
    }
    case Scenario::hetnet: {
        HetNetSimulator s(cfg.hetnet, sim);
        CoverageEstimate e = s.run();
        radius = e.window_radius;
        return e;
    }
    }
    throw std::logic_error("unknown scenario");
}

template <class F>
int guarded(std::ostream& err, F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const QuadratureError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

// Writes `emit` to `path`, or to `out` when the path is empty.
void emit_to(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& emit)
{
    if (path.empty()) {
        emit(out);
        return;
    }
    std::ostringstream buffer;
    emit(buffer);
    std::ofstream f(path);
    if (!f) throw ConfigError("output.path", "cannot open '" + path + "' for writing");
    f << buffer.str();
}

struct Flags {
    std::string config;
    double lambda = 0, p = 0, alpha = 0, sigma2 = 0, shadow_db = 0, epsilon = 0, lambda_u = 0;
    double delta = 0, min_bs = 0, tolerance = 0;
    std::string snr_db, tau_db, mode, format, out, tiers, rule, window_policy;
    std::uint64_t trials = 0, seed = 0;
    unsigned threads = 0;
    bool no_noise = false;
    std::map<std::string, CLI::Option*> opt;

    bool given(const std::string& name) const
    {
        const auto it = opt.find(name);
        return it != opt.end() && it->second->count() > 0;
    }
};

void add_common(CLI::App* app, Flags& f, bool with_power)
{
    f.opt["config"] = app->add_option("--config", f.config, "JSON config file, or preset:<name>");
    if (with_power) {
        f.opt["lambda"] = app->add_option("--lambda", f.lambda, "BS density");
        f.opt["p"] = app->add_option("--p", f.p, "transmit power");
        f.opt["snr-db"] = app->add_option("--snr-db", f.snr_db, "p / sigma2 in dB; inf for no noise");
    }
    f.opt["alpha"] = app->add_option("--alpha", f.alpha, "path-loss exponent (> 2)");
    f.opt["sigma2"] = app->add_option("--sigma2", f.sigma2, "noise power");
    f.opt["tau-db"] = app->add_option("--tau-db", f.tau_db, "threshold grid in dB: value or start:step:stop");
    f.opt["mode"] = app->add_option("--mode", f.mode, "analytic | simulate | validate");
    f.opt["trials"] = app->add_option("--trials", f.trials, "Monte Carlo trials");
    f.opt["seed"] = app->add_option("--seed", f.seed, "master seed");
    f.opt["threads"] = app->add_option("--threads", f.threads, "worker threads (0: all cores)");
    f.opt["delta"] = app->add_option("--delta", f.delta, "interference truncation fraction");
    f.opt["min-bs"] = app->add_option("--min-bs", f.min_bs, "minimum expected BS count in the window");
    f.opt["window-policy"] = app->add_option("--window-policy", f.window_policy, "compensated | mean_bound");
    f.opt["tolerance"] = app->add_option("--tolerance", f.tolerance, "max gap accepted in validate mode");
    f.opt["out"] = app->add_option("--out", f.out, "output file (default: stdout)");
    f.opt["format"] = app->add_option("--format", f.format, "csv | json");
}

void add_downlink(CLI::App* app, Flags& f)
{
    f.opt["shadow-db"] = app->add_option("--shadow-db", f.shadow_db, "lognormal shadowing spread in dB");
}

void add_uplink(CLI::App* app, Flags& f)
{
    f.opt["epsilon"] = app->add_option("--epsilon", f.epsilon, "power-control fraction in [0, 1]");
    f.opt["lambda-u"] = app->add_option("--lambda-u", f.lambda_u, "user density (default 10 * lambda)");
}

void add_hetnet(CLI::App* app, Flags& f)
{
    f.opt["tiers"] = app->add_option("--tiers", f.tiers, "tier list \"lambda,p,tau;...\" (tau linear)");
    f.opt["rule"] = app->add_option("--rule", f.rule, "avg | inst");
    f.opt["no-noise"] = app->add_flag("--no-noise", f.no_noise, "set sigma2 = 0");
}

std::vector<TierSpec> parse_tiers(const std::string& text)
{
    std::vector<TierSpec> tiers;
    std::stringstream all(text);
    std::string item;
    std::size_t index = 0;
    while (std::getline(all, item, ';')) {
        const std::string field = "params.tiers[" + std::to_string(index) + "]";
        std::stringstream one(item);
        std::string tok;
        std::vector<double> v;
        while (std::getline(one, tok, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(tok, &used));
                while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError(field, "'" + tok + "' is not a number");
            }
        }
        if (v.size() != 3) throw ConfigError(field, "expected lambda,p,tau");
        tiers.push_back({v[0], v[1], v[2]});
        ++index;
    }
    if (tiers.empty()) throw ConfigError("params.tiers", "empty tier list");
    return tiers;
}

double snr_to_sigma2(const std::string& text, double p)
{
    if (text == "inf" || text == "+inf") return 0.0;
    std::size_t used = 0;
    double db = 0.0;
    try {
        db = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("params.snr_db", "'" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError("params.snr_db", "'" + text + "' is not a number");
    if (std::isinf(db) && db > 0) return 0.0;
    if (!std::isfinite(db)) throw ConfigError("params.snr_db", "must be finite or inf");
    return p / db_to_linear(db);
}

RunConfig base_config(const Flags& f, Scenario scenario)
{
    RunConfig cfg;
    cfg.scenario = scenario;
    if (f.given("config")) {
        const std::string prefix = "preset:";
        if (f.config.rfind(prefix, 0) == 0) {
            cfg = preset(f.config.substr(prefix.size()));
        } else {
            cfg = parse_config_file(f.config);
        }
        if (cfg.scenario != scenario) {
            throw ConfigError("scenario", "config describes a " + to_string(cfg.scenario) + " run but the command is " +
                                              to_string(scenario));
        }
    }
    return cfg;
}

void apply_value(RunConfig& cfg, const std::string& key, double v)
{
    switch (cfg.scenario) {
    case Scenario::downlink:
        if (key == "lambda") cfg.downlink.lambda = v;
        else if (key == "p") cfg.downlink.p = v;
        else if (key == "alpha") cfg.downlink.alpha = v;
        else if (key == "sigma2") cfg.downlink.sigma2 = v;
        else if (key == "shadow_db") cfg.shadow_db = v;
        else throw ConfigError(key, "not a downlink parameter");
        break;
    case Scenario::uplink:
        if (key == "lambda") cfg.uplink.lambda = v;
        else if (key == "p") cfg.uplink.p = v;
        else if (key == "alpha") cfg.uplink.alpha = v;
        else if (key == "sigma2") cfg.uplink.sigma2 = v;
        else if (key == "epsilon") cfg.uplink.epsilon = v;
        else if (key == "lambda_u") cfg.lambda_u = v;
        else throw ConfigError(key, "not an uplink parameter");
        break;
    case Scenario::hetnet:
        if (key == "alpha") cfg.hetnet.alpha = v;
        else if (key == "sigma2") cfg.hetnet.sigma2 = v;
        else throw ConfigError(key, "not a hetnet parameter (tiers are set with --tiers)");
        break;
    }
}

void apply_snr_db(RunConfig& cfg, const std::string& text)
{
    if (cfg.scenario == Scenario::downlink) cfg.downlink.sigma2 = snr_to_sigma2(text, cfg.downlink.p);
    else if (cfg.scenario == Scenario::uplink) cfg.uplink.sigma2 = snr_to_sigma2(text, cfg.uplink.p);
    else throw ConfigError("snr_db", "not a hetnet parameter; use --sigma2");
}

RunConfig build_config(const Flags& f, Scenario scenario)
{
    RunConfig cfg = base_config(f, scenario);
    if (f.given("snr-db") && f.given("sigma2")) throw ConfigError("params.snr_db", "give either --snr-db or --sigma2");
    if (f.given("lambda")) apply_value(cfg, "lambda", f.lambda);
    if (f.given("p")) apply_value(cfg, "p", f.p);
    if (f.given("alpha")) apply_value(cfg, "alpha", f.alpha);
    if (f.given("sigma2")) apply_value(cfg, "sigma2", f.sigma2);
    if (f.given("snr-db")) apply_snr_db(cfg, f.snr_db);
    if (f.given("shadow-db")) apply_value(cfg, "shadow_db", f.shadow_db);
    if (f.given("epsilon")) apply_value(cfg, "epsilon", f.epsilon);
    if (f.given("lambda-u")) apply_value(cfg, "lambda_u", f.lambda_u);
    if (f.given("tiers")) cfg.hetnet.tiers = parse_tiers(f.tiers);
    if (f.given("rule")) {
        try {
            cfg.hetnet.rule = parse_association_rule(f.rule);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("params.rule", e.what());
        }
    }
    if (f.no_noise) cfg.hetnet.sigma2 = 0.0;
    if (f.given("tau-db")) cfg.grid = GridSpec::parse(f.tau_db);
    if (f.given("mode")) cfg.mode = parse_mode(f.mode);
    if (f.given("trials")) cfg.sim.trials = f.trials;
    if (f.given("seed")) cfg.sim.master_seed = f.seed;
    if (f.given("threads")) cfg.sim.threads = f.threads;
    if (f.given("delta")) cfg.sim.truncation_fraction = f.delta;
    if (f.given("min-bs")) cfg.sim.min_expected_bs = f.min_bs;
    if (f.given("window-policy")) {
        if (f.window_policy == "compensated") cfg.sim.window_policy = WindowPolicy::compensated;
        else if (f.window_policy == "mean_bound") cfg.sim.window_policy = WindowPolicy::mean_bound;
        else throw ConfigError("sim.window_policy", "expected compensated or mean_bound");
    }
    if (f.given("tolerance")) cfg.tolerance = f.tolerance;
    if (f.given("out")) cfg.out_path = f.out;
    if (f.given("format")) cfg.format = parse_format(f.format);
    if (cfg.scenario == Scenario::hetnet && cfg.hetnet.tiers.empty()) {
        throw ConfigError("params.tiers", "at least one tier is required (--tiers \"lambda,p,tau;...\")");
    }
    cfg.validate();
    return cfg;
}

int run_regressions(std::uint64_t trials, std::uint64_t seed, const std::vector<std::string>& only,
                    const std::string& format, const std::string& path, std::ostream& out, std::ostream& err)
{
    json summary = json::array();
    bool all_pass = true;
    std::ostringstream csv;
    csv.precision(17);
    csv << "case,max_gap,tolerance,fraction_inside_ci,pass\n";
    bool ran = false;
    for (RegressionCase& c : regression_cases(trials)) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
        ran = true;
        c.config.sim.master_seed = seed;
        const RunOutput res = execute(c.config);
        const ValidationReport& r = *res.report;
        all_pass = all_pass && r.pass;
        err << c.name << ": " << (r.pass ? "PASS" : "FAIL") << " max_gap=" << r.max_gap << " tol=" << r.tolerance
            << '\n';
        summary.push_back({{"case", c.name},
                           {"max_gap", r.max_gap},
                           {"tolerance", r.tolerance},
                           {"fraction_inside_ci", r.fraction_inside_ci},
                           {"pass", r.pass}});
        csv << c.name << ',' << r.max_gap << ',' << r.tolerance << ',' << r.fraction_inside_ci << ','
            << (r.pass ? "true" : "false") << '\n';
    }
    if (!ran) throw ConfigError("only", "no regression case matches");
    emit_to(path, out, [&](std::ostream& os) {
        if (format == "json") {
            os << json{{"trials", trials}, {"seed", seed}, {"cases", summary}, {"pass", all_pass}}.dump(2) << '\n';
        } else {
            os << csv.str();
        }
    });
    return all_pass ? kExitOk : kExitValidationFailed;
}

struct SweepAxis {
    std::string key;
    std::vector<double> values;
    std::string raw_key;  // as typed, e.g. snr_db
};

SweepAxis parse_axis(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("vary", "expected key=v1,v2,... got '" + text + "'");
    SweepAxis axis;
    axis.key = text.substr(0, eq);
    std::stringstream ss(text.substr(eq + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (axis.key == "snr_db" && (tok == "inf" || tok == "+inf")) {
            axis.values.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            std::size_t used = 0;
            axis.values.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("vary." + axis.key, "'" + tok + "' is not a number");
        }
    }
    if (axis.values.empty()) throw ConfigError("vary." + axis.key, "no values");
    return axis;
}

int run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes, std::ostream& out, std::ostream& err)
{
    // Build every point first so that a bad value fails before any output.
    std::vector<std::vector<double>> points{{}};
    for (const SweepAxis& a : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& p : points) {
            for (double v : a.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(q);
            }
        }
        points = std::move(next);
    }
    std::vector<RunConfig> configs;
    for (const auto& p : points) {
        RunConfig cfg = base;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            if (axes[k].key == "snr_db") {
                std::ostringstream os;
                os.precision(17);
                os << p[k];
                apply_snr_db(cfg, std::isinf(p[k]) ? "inf" : os.str());
            } else {
                apply_value(cfg, axes[k].key, p[k]);
            }
        }
        cfg.validate();
        configs.push_back(cfg);
    }

    int status = kExitOk;
    std::vector<RunOutput> results;
    for (const RunConfig& cfg : configs) {
        results.push_back(execute(cfg));
        status = std::max(status, results.back().status);
    }
    emit_to(base.out_path, out, [&](std::ostream& os) {
        if (base.format == Format::json) {
            json arr = json::array();
            for (std::size_t i = 0; i < configs.size(); ++i) {
                json values;
                for (std::size_t k = 0; k < axes.size(); ++k) values[axes[k].key] = points[i][k];
                arr.push_back({{"values", values}, {"result", result_json(configs[i], results[i])}});
            }
            os << json{{"points", arr}}.dump(2) << '\n';
            return;
        }
        bool header = true;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            std::ostringstream body;
            write_csv(body, configs[i], results[i]);
            std::stringstream lines(body.str());
            std::string line;
            std::getline(lines, line);
            if (header) {
                for (const SweepAxis& a : axes) os << a.key << ',';
                os << line << '\n';
                header = false;
            }
            std::ostringstream prefix;
            prefix.precision(17);
            for (std::size_t k = 0; k < axes.size(); ++k) prefix << points[i][k] << ',';
            while (std::getline(lines, line)) os << prefix.str() << line << '\n';
        }
    });
    if (status == kExitValidationFailed) err << "validation failed at one or more sweep points\n";
    return status;
}

}  // namespace

RunOutput execute(const RunConfig& cfg)
{
    cfg.validate();
    RunOutput out;
    out.thresholds = cfg.linear_grid();
    if (cfg.mode != Mode::simulate) out.analytic = analytic_curve(cfg, out.thresholds);
    if (cfg.mode != Mode::analytic) out.empirical = empirical_curve(cfg, out.thresholds, out.window_radius);
    if (cfg.mode == Mode::validate) {
        out.report = compare_curves(*out.analytic, *out.empirical, cfg.tolerance);
        if (!out.report->pass) out.status = kExitValidationFailed;
    }
    return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const RunOutput res = execute(cfg);
        emit_to(cfg.out_path, out, [&](std::ostream& os) {
            if (cfg.format == Format::json) {
                os << result_json(cfg, res).dump(2) << '\n';
            } else {
                write_csv(os, cfg, res);
            }
        });
        if (res.report && !res.report->pass) {
            err << "validation failed: max gap " << res.report->max_gap << " exceeds tolerance "
                << res.report->tolerance << '\n';
        }
        return res.status;
    });
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Coverage of cellular networks modeled by Poisson point processes"};
    app.require_subcommand(1);

    Flags dl_flags, ul_flags, hn_flags, sw_flags;
    CLI::App* dl = app.add_subcommand("downlink", "single-tier downlink coverage");
    add_common(dl, dl_flags, true);
    add_downlink(dl, dl_flags);
    CLI::App* ul = app.add_subcommand("uplink", "uplink coverage with fractional power control");
    add_common(ul, ul_flags, true);
    add_uplink(ul, ul_flags);
    CLI::App* hn = app.add_subcommand("hetnet", "k-tier heterogeneous network coverage");
    add_common(hn, hn_flags, false);
    add_hetnet(hn, hn_flags);

    CLI::App* sw = app.add_subcommand("sweep", "cartesian sweep over parameters, long-format output");
    std::string sweep_scenario;
    std::vector<std::string> vary;
    sw->add_option("--scenario", sweep_scenario, "downlink | uplink | hetnet")->required();
    sw->add_option("--vary", vary, "key=v1,v2,... (repeatable)")->required();
    add_common(sw, sw_flags, true);
    add_downlink(sw, sw_flags);
    add_uplink(sw, sw_flags);
    add_hetnet(sw, sw_flags);

    CLI::App* va = app.add_subcommand("validate", "run the built-in regression scenarios");
    std::uint64_t va_trials = 20000;
    std::uint64_t va_seed = 1;
    std::vector<std::string> va_only;
    std::string va_format = "csv";
    std::string va_out;
    va->add_option("--trials", va_trials, "trials per scenario");
    va->add_option("--seed", va_seed, "master seed");
    va->add_option("--only", va_only, "restrict to the named cases");
    va->add_option("--format", va_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    va->add_option("--out", va_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "invalid arguments: " << e.what() << '\n';
        return kExitInvalidConfig;
    }

    return guarded(err, [&]() -> int {
        if (dl->parsed()) return run(build_config(dl_flags, Scenario::downlink), out, err);
        if (ul->parsed()) return run(build_config(ul_flags, Scenario::uplink), out, err);
        if (hn->parsed()) return run(build_config(hn_flags, Scenario::hetnet), out, err);
        if (sw->parsed()) {
            const Scenario s = parse_scenario(sweep_scenario);
            Flags& f = sw_flags;
            std::vector<SweepAxis> axes;
            for (const std::string& v : vary) axes.push_back(parse_axis(v));
            if (s == Scenario::hetnet && !f.given("tiers") && !f.given("config")) {
                throw ConfigError("params.tiers", "at least one tier is required (--tiers \"lambda,p,tau;...\")");
            }
            const RunConfig base = build_config(f, s);
            return run_sweep(base, axes, out, err);
        }
        if (va->parsed()) return run_regressions(va_trials, va_seed, va_only, va_format, va_out, out, err);
        return kExitInvalidConfig;
    });
}

}  // namespace sgcov::cli
