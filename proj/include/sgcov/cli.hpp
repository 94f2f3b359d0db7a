#pragma once

#include "sgcov/downlink.hpp"
#include "sgcov/hetnet.hpp"
#include "sgcov/sim.hpp"
#include "sgcov/uplink.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgcov::cli {

enum class Scenario { downlink, uplink, hetnet };
enum class Mode { analytic, simulate, validate };
enum class Format { csv, json };

std::string to_string(Scenario s);
std::string to_string(Mode m);
std::string to_string(Format f);
Scenario parse_scenario(const std::string& text);
Mode parse_mode(const std::string& text);
Format parse_format(const std::string& text);

// Exit statuses of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitValidationFailed = 3;

// Invalid configuration; `field` is the key path of the offending value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Threshold grid in dB: start:step:stop inclusive, or a single value.
struct GridSpec {
    double start_db = 0.0;
    double step_db = 1.0;
    double stop_db = 0.0;

    static GridSpec parse(const std::string& text);
    std::string to_string() const;
    void validate() const;
    std::vector<double> values_db() const;
};

double db_to_linear(double db);

struct RunConfig {
    Scenario scenario = Scenario::downlink;
    Mode mode = Mode::analytic;

    DownlinkParams downlink;
    std::optional<double> shadow_db;  // lognormal shadowing spread, downlink only

    UplinkParams uplink;
    std::optional<double> lambda_u;  // defaults to 10 * lambda

    // For the hetnet the grid is an offset in dB applied to every tier threshold.
    HetNetParams hetnet;

    GridSpec grid;
    SimConfig sim;  // threshold_grid is filled in from `grid` at run time
    double tolerance = 0.01;

    std::string out_path;  // empty: standard output
    Format format = Format::csv;

    void validate() const;
    double resolved_lambda_u() const;
    std::vector<double> linear_grid() const;
};

RunConfig parse_config_json(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

// Built-in named setups, e.g. "ul-fpc", "dl-nonoise-a4".
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Regression scenarios exercised by the `validate` command, with the
// tolerance each one is held to.
struct RegressionCase {
    std::string name;
    RunConfig config;
};
std::vector<RegressionCase> regression_cases(std::uint64_t trials);

struct RunOutput {
    int status = kExitOk;
    std::vector<double> thresholds;
    std::optional<CoverageCurve> analytic;
    std::optional<CoverageEstimate> empirical;
    std::optional<ValidationReport> report;
    double window_radius = 0.0;
};

// Computes the artifact for one validated config (no I/O).
RunOutput execute(const RunConfig& cfg);

// CSV with header tau_db,tau_linear,coverage[,ci_low,ci_high,trials[,analytic,gap]].
void write_csv(std::ostream& os, const RunConfig& cfg, const RunOutput& out);
nlohmann::json result_json(const RunConfig& cfg, const RunOutput& out);

// Full run: execute, then write to cfg.out_path (or `out`). Returns the exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Command-line entry point.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgcov::cli
