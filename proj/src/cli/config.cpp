#include "sgcov/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace sgcov::cli {

using nlohmann::json;

namespace {

double parse_number(const std::string& text, const std::string& field)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field, "'" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError(field, "'" + text + "' is not a number");
    return v;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key (allowed: " + list + ")");
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& path)
{
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& path)
{
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(path + "." + key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path)
{
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

// sigma2 from an SNR in dB relative to power p; "inf" means no noise.
double sigma2_from_snr_db(const json& v, double p, const std::string& field)
{
    double snr_db = 0.0;
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return 0.0;
        snr_db = parse_number(s, field);
    } else if (v.is_number()) {
        snr_db = v.get<double>();
    } else {
        throw ConfigError(field, "expected a number or \"inf\"");
    }
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    if (!std::isfinite(snr_db)) throw ConfigError(field, "snr must be finite or +inf");
    return p / db_to_linear(snr_db);
}

template <class Params>
void read_noise(const json& obj, const std::string& path, Params& params)
{
    if (obj.contains("sigma2") && obj.contains("snr_db")) {
        throw ConfigError(path + ".snr_db", "give either sigma2 or snr_db, not both");
    }
    if (obj.contains("sigma2")) params.sigma2 = get_number(obj, "sigma2", path);
    if (obj.contains("snr_db")) params.sigma2 = sigma2_from_snr_db(obj.at("snr_db"), params.p, path + ".snr_db");
}

GridSpec read_grid(const json& v)
{
    if (v.is_string()) return GridSpec::parse(v.get<std::string>());
    if (v.is_number()) {
        const double x = v.get<double>();
        return GridSpec{x, 1.0, x};
    }
    check_keys(v, "grid", {"start_db", "step_db", "stop_db"});
    GridSpec g;
    g.start_db = get_number(v, "start_db", "grid");
    g.stop_db = v.contains("stop_db") ? get_number(v, "stop_db", "grid") : g.start_db;
    g.step_db = v.contains("step_db") ? get_number(v, "step_db", "grid") : 1.0;
    return g;
}

WindowPolicy parse_window_policy(const std::string& s)
{
    if (s == "compensated") return WindowPolicy::compensated;
    if (s == "mean_bound") return WindowPolicy::mean_bound;
    throw ConfigError("sim.window_policy", "expected compensated or mean_bound, got '" + s + "'");
}

std::string window_policy_name(WindowPolicy w)
{
    return w == WindowPolicy::compensated ? "compensated" : "mean_bound";
}

std::string line_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void positive(double v, const std::string& field)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive and finite");
}

void nonnegative(double v, const std::string& field)
{
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be finite and >= 0");
}

void alpha_ok(double v, const std::string& field)
{
    if (!(v > 2.0) || !std::isfinite(v)) throw ConfigError(field, "path-loss exponent must exceed 2");
}

}  // namespace

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::downlink: return "downlink";
    case Scenario::uplink: return "uplink";
    case Scenario::hetnet: return "hetnet";
    }
    return "?";
}

std::string to_string(Mode m)
{
    switch (m) {
    case Mode::analytic: return "analytic";
    case Mode::simulate: return "simulate";
    case Mode::validate: return "validate";
    }
    return "?";
}

std::string to_string(Format f)
{
    return f == Format::csv ? "csv" : "json";
}

Scenario parse_scenario(const std::string& text)
{
    if (text == "downlink") return Scenario::downlink;
    if (text == "uplink") return Scenario::uplink;
    if (text == "hetnet") return Scenario::hetnet;
    throw ConfigError("scenario", "expected downlink, uplink or hetnet, got '" + text + "'");
}

Mode parse_mode(const std::string& text)
{
    if (text == "analytic") return Mode::analytic;
    if (text == "simulate") return Mode::simulate;
    if (text == "validate") return Mode::validate;
    throw ConfigError("mode", "expected analytic, simulate or validate, got '" + text + "'");
}

Format parse_format(const std::string& text)
{
    if (text == "csv") return Format::csv;
    if (text == "json") return Format::json;
    throw ConfigError("output.format", "expected csv or json, got '" + text + "'");
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

GridSpec GridSpec::parse(const std::string& text)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    GridSpec g;
    if (parts.size() == 1) {
        g.start_db = g.stop_db = parse_number(parts[0], "grid");
        g.step_db = 1.0;
    } else if (parts.size() == 3) {
        g.start_db = parse_number(parts[0], "grid");
        g.step_db = parse_number(parts[1], "grid");
        g.stop_db = parse_number(parts[2], "grid");
        if (!(g.start_db < g.stop_db)) throw ConfigError("grid", "start must be below stop in '" + text + "'");
    } else {
        throw ConfigError("grid", "expected a dB value or start:step:stop, got '" + text + "'");
    }
    g.validate();
    return g;
}

std::string GridSpec::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    if (start_db == stop_db) {
        os << start_db;
    } else {
        os << start_db << ':' << step_db << ':' << stop_db;
    }
    return os.str();
}

void GridSpec::validate() const
{
    if (!std::isfinite(start_db) || !std::isfinite(stop_db) || !std::isfinite(step_db)) {
        throw ConfigError("grid", "start, step and stop must be finite");
    }
    if (!(step_db > 0.0)) throw ConfigError("grid", "step must be positive");
    if (start_db > stop_db) throw ConfigError("grid", "start must not exceed stop");
    if ((stop_db - start_db) / step_db > 1e6) throw ConfigError("grid", "more than 10^6 grid points");
}

std::vector<double> GridSpec::values_db() const
{
    validate();
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) v.push_back(start_db + static_cast<double>(k) * step_db);
    return v;
}

double RunConfig::resolved_lambda_u() const
{
    return lambda_u ? *lambda_u : 10.0 * uplink.lambda;
}

std::vector<double> RunConfig::linear_grid() const
{
    std::vector<double> out;
    for (double db : grid.values_db()) out.push_back(db_to_linear(db));
    return out;
}

void RunConfig::validate() const
{
    grid.validate();
    switch (scenario) {
    case Scenario::downlink:
        positive(downlink.lambda, "params.lambda");
        positive(downlink.p, "params.p");
        alpha_ok(downlink.alpha, "params.alpha");
        nonnegative(downlink.sigma2, "params.sigma2");
        if (shadow_db) nonnegative(*shadow_db, "params.shadow_db");
        break;
    case Scenario::uplink:
        positive(uplink.lambda, "params.lambda");
        positive(uplink.p, "params.p");
        alpha_ok(uplink.alpha, "params.alpha");
        nonnegative(uplink.sigma2, "params.sigma2");
        if (!(uplink.epsilon >= 0.0 && uplink.epsilon <= 1.0)) {
            throw ConfigError("params.epsilon", "power-control fraction must lie in [0, 1]");
        }
        if (lambda_u) positive(*lambda_u, "params.lambda_u");
        break;
    case Scenario::hetnet: {
        alpha_ok(hetnet.alpha, "params.alpha");
        nonnegative(hetnet.sigma2, "params.sigma2");
        if (hetnet.tiers.empty()) throw ConfigError("params.tiers", "at least one tier is required");
        for (std::size_t i = 0; i < hetnet.tiers.size(); ++i) {
            const std::string f = "params.tiers[" + std::to_string(i) + "]";
            positive(hetnet.tiers[i].lambda, f + ".lambda");
            positive(hetnet.tiers[i].p, f + ".p");
            positive(hetnet.tiers[i].tau, f + ".tau");
        }
        if (hetnet.rule == AssociationRule::instantaneous_power && mode != Mode::simulate) {
            const double g = db_to_linear(grid.start_db);
            for (std::size_t i = 0; i < hetnet.tiers.size(); ++i) {
                const double tau = hetnet.tiers[i].tau * g;
                if (!(tau > 1.0)) {
                    std::ostringstream os;
                    os << "instantaneous-power analytics need tau > 1 on every tier (effective tau = " << tau
                       << "); only then can at most one BS across all tiers satisfy its threshold. "
                       << "Use mode=simulate for tau <= 1";
                    throw ConfigError("params.tiers[" + std::to_string(i) + "].tau", os.str());
                }
            }
        }
        break;
    }
    }
    if (mode != Mode::analytic) {
        if (sim.trials < 1) throw ConfigError("sim.trials", "must be >= 1");
        if (!(sim.truncation_fraction > 0.0 && sim.truncation_fraction <= 0.1)) {
            throw ConfigError("sim.truncation_fraction", "must lie in (0, 0.1]");
        }
        positive(sim.min_expected_bs, "sim.min_expected_bs");
    }
    nonnegative(tolerance, "tolerance");
}

RunConfig parse_config_json(const json& doc)
{
    check_keys(doc, "", {"scenario", "mode", "params", "grid", "sim", "tolerance", "output"});
    if (!doc.contains("scenario")) throw ConfigError("scenario", "required key missing");
    RunConfig cfg;
    cfg.scenario = parse_scenario(get_string(doc, "scenario", ""));
    if (doc.contains("mode")) cfg.mode = parse_mode(get_string(doc, "mode", ""));

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        const std::string path = "params";
        switch (cfg.scenario) {
        case Scenario::downlink:
            check_keys(p, path, {"lambda", "p", "alpha", "sigma2", "snr_db", "shadow_db"});
            if (p.contains("lambda")) cfg.downlink.lambda = get_number(p, "lambda", path);
            if (p.contains("p")) cfg.downlink.p = get_number(p, "p", path);
            if (p.contains("alpha")) cfg.downlink.alpha = get_number(p, "alpha", path);
            read_noise(p, path, cfg.downlink);
            if (p.contains("shadow_db")) cfg.shadow_db = get_number(p, "shadow_db", path);
            break;
        case Scenario::uplink:
            check_keys(p, path, {"lambda", "p", "alpha", "epsilon", "sigma2", "snr_db", "lambda_u"});
            if (p.contains("lambda")) cfg.uplink.lambda = get_number(p, "lambda", path);
            if (p.contains("p")) cfg.uplink.p = get_number(p, "p", path);
            if (p.contains("alpha")) cfg.uplink.alpha = get_number(p, "alpha", path);
            if (p.contains("epsilon")) cfg.uplink.epsilon = get_number(p, "epsilon", path);
            read_noise(p, path, cfg.uplink);
            if (p.contains("lambda_u")) cfg.lambda_u = get_number(p, "lambda_u", path);
            break;
        case Scenario::hetnet:
            check_keys(p, path, {"alpha", "sigma2", "rule", "tiers"});
            if (p.contains("alpha")) cfg.hetnet.alpha = get_number(p, "alpha", path);
            if (p.contains("sigma2")) cfg.hetnet.sigma2 = get_number(p, "sigma2", path);
            if (p.contains("rule")) {
                try {
                    cfg.hetnet.rule = parse_association_rule(get_string(p, "rule", path));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("params.rule", e.what());
                }
            }
            if (p.contains("tiers")) {
                const json& tiers = p.at("tiers");
                if (!tiers.is_array()) throw ConfigError("params.tiers", "expected an array");
                for (std::size_t i = 0; i < tiers.size(); ++i) {
                    const std::string tp = "params.tiers[" + std::to_string(i) + "]";
                    check_keys(tiers[i], tp, {"lambda", "p", "tau"});
                    for (const char* k : {"lambda", "p", "tau"}) {
                        if (!tiers[i].contains(k)) throw ConfigError(tp + "." + k, "required key missing");
                    }
                    cfg.hetnet.tiers.push_back({get_number(tiers[i], "lambda", tp), get_number(tiers[i], "p", tp),
                                                get_number(tiers[i], "tau", tp)});
                }
            }
            break;
        }
    }
    if (doc.contains("grid")) cfg.grid = read_grid(doc.at("grid"));
    if (doc.contains("sim")) {
        const json& s = doc.at("sim");
        check_keys(s, "sim", {"trials", "seed", "truncation_fraction", "min_expected_bs", "window_policy", "threads",
                              "window_radius"});
        if (s.contains("trials")) cfg.sim.trials = get_count(s, "trials", "sim");
        if (s.contains("seed")) cfg.sim.master_seed = get_count(s, "seed", "sim");
        if (s.contains("truncation_fraction")) cfg.sim.truncation_fraction = get_number(s, "truncation_fraction", "sim");
        if (s.contains("min_expected_bs")) cfg.sim.min_expected_bs = get_number(s, "min_expected_bs", "sim");
        if (s.contains("window_policy")) cfg.sim.window_policy = parse_window_policy(get_string(s, "window_policy", "sim"));
        if (s.contains("threads")) cfg.sim.threads = static_cast<unsigned>(get_count(s, "threads", "sim"));
        // window_radius is an output field; accepted so that emitted configs reparse.
    }
    if (doc.contains("tolerance")) cfg.tolerance = get_number(doc, "tolerance", "");
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_keys(o, "output", {"path", "format"});
        if (o.contains("path")) cfg.out_path = get_string(o, "path", "output");
        if (o.contains("format")) cfg.format = parse_format(get_string(o, "format", "output"));
    }
    if (cfg.scenario == Scenario::hetnet && cfg.hetnet.tiers.empty()) {
        throw ConfigError("params.tiers", "at least one tier is required");
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "config parse error at " + line_column(text, e.byte) + ": " + e.what());
    }
    return parse_config_json(doc);
}

RunConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const RunConfig& cfg)
{
    json doc;
    doc["scenario"] = to_string(cfg.scenario);
    doc["mode"] = to_string(cfg.mode);
    json p;
    switch (cfg.scenario) {
    case Scenario::downlink:
        p = {{"lambda", cfg.downlink.lambda}, {"p", cfg.downlink.p}, {"alpha", cfg.downlink.alpha},
             {"sigma2", cfg.downlink.sigma2}};
        if (cfg.shadow_db) p["shadow_db"] = *cfg.shadow_db;
        break;
    case Scenario::uplink:
        p = {{"lambda", cfg.uplink.lambda},   {"p", cfg.uplink.p},           {"alpha", cfg.uplink.alpha},
             {"epsilon", cfg.uplink.epsilon}, {"sigma2", cfg.uplink.sigma2}, {"lambda_u", cfg.resolved_lambda_u()}};
        break;
    case Scenario::hetnet: {
        p = {{"alpha", cfg.hetnet.alpha}, {"sigma2", cfg.hetnet.sigma2}, {"rule", to_string(cfg.hetnet.rule)}};
        json tiers = json::array();
        for (const TierSpec& t : cfg.hetnet.tiers) tiers.push_back({{"lambda", t.lambda}, {"p", t.p}, {"tau", t.tau}});
        p["tiers"] = tiers;
        break;
    }
    }
    doc["params"] = p;
    doc["grid"] = {{"start_db", cfg.grid.start_db}, {"step_db", cfg.grid.step_db}, {"stop_db", cfg.grid.stop_db}};
    doc["sim"] = {{"trials", cfg.sim.trials},
                  {"seed", cfg.sim.master_seed},
                  {"truncation_fraction", cfg.sim.truncation_fraction},
                  {"min_expected_bs", cfg.sim.min_expected_bs},
                  {"window_policy", window_policy_name(cfg.sim.window_policy)},
                  {"threads", cfg.sim.threads}};
    doc["tolerance"] = cfg.tolerance;
    json out = {{"format", to_string(cfg.format)}};
    if (!cfg.out_path.empty()) out["path"] = cfg.out_path;
    doc["output"] = out;
    return doc;
}

std::vector<std::string> preset_names()
{
    return {"dl-nonoise-a4", "dl-shadow8-snr10", "ul-fpc", "hetnet-3tier-avg", "hetnet-3tier-inst"};
}

RunConfig preset(const std::string& name)
{
    RunConfig cfg;
    if (name == "dl-nonoise-a4") {
        cfg.scenario = Scenario::downlink;
        cfg.downlink = {1.0, 1.0, 4.0, 0.0};
        cfg.grid = {-10.0, 1.0, 20.0};
    } else if (name == "dl-shadow8-snr10") {
        cfg.scenario = Scenario::downlink;
        cfg.downlink = {1.0, 1.0, 4.0, 0.1};
        cfg.shadow_db = 8.0;
        cfg.grid = {-10.0, 1.0, 20.0};
    } else if (name == "ul-fpc") {
        cfg.scenario = Scenario::uplink;
        cfg.uplink = {4e-6, 1.0, 4.0, 1.0, 0.0};
        cfg.grid = {-10.0, 1.0, 20.0};
    } else if (name == "hetnet-3tier-avg" || name == "hetnet-3tier-inst") {
        const bool inst = name == "hetnet-3tier-inst";
        cfg.scenario = Scenario::hetnet;
        const double tau = inst ? 2.0 : 1.0;
        cfg.hetnet.tiers = {{1e-6, 100.0, tau}, {1e-5, 10.0, tau}, {1e-4, 1.0, tau}};
        cfg.hetnet.alpha = 4.0;
        cfg.hetnet.sigma2 = 0.0;
        cfg.hetnet.rule = inst ? AssociationRule::instantaneous_power : AssociationRule::average_power;
        cfg.grid = inst ? GridSpec{0.0, 1.0, 10.0} : GridSpec{-10.0, 1.0, 20.0};
    } else {
        std::string list;
        for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("preset", "unknown preset '" + name + "' (available: " + list + ")");
    }
    return cfg;
}

std::vector<RegressionCase> regression_cases(std::uint64_t trials)
{
    std::vector<RegressionCase> cases;
    auto add = [&](const std::string& name, RunConfig cfg, double tol) {
        cfg.mode = Mode::validate;
        cfg.sim.trials = trials;
        cfg.tolerance = tol;
        cases.push_back({name, std::move(cfg)});
    };
    // Tolerances leave room for about four standard errors at 2*10^4 trials
    // on top of the known model gap of each scenario.
    RunConfig dl = preset("dl-nonoise-a4");
    dl.grid = {-10.0, 2.0, 20.0};
    add("dl-nonoise-a4", dl, 0.015);

    RunConfig dl3 = dl;
    dl3.downlink.alpha = 3.0;
    add("dl-nonoise-a3", dl3, 0.015);

    RunConfig sh = preset("dl-shadow8-snr10");
    sh.grid = {-10.0, 2.0, 20.0};
    add("dl-shadow8-snr10", sh, 0.02);

    for (double eps : {0.0, 0.5, 1.0}) {
        RunConfig up = preset("ul-fpc");
        up.uplink.epsilon = eps;
        up.grid = {-10.0, 2.0, 20.0};
        std::ostringstream name;
        name << "ul-fpc-eps" << eps;
        add(name.str(), up, 0.045);
    }

    RunConfig ha = preset("hetnet-3tier-avg");
    ha.grid = {-10.0, 2.0, 20.0};
    add("hetnet-3tier-avg", ha, 0.015);
    add("hetnet-3tier-inst", preset("hetnet-3tier-inst"), 0.015);
    return cases;
}

}  // namespace sgcov::cli
