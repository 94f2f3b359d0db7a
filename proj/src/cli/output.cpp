#include "sgcov/cli.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace sgcov::cli {

using nlohmann::json;

namespace {

std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void write_csv(std::ostream& os, const RunConfig& cfg, const RunOutput& out)
{
    const bool sim = out.empirical.has_value();
    const bool val = out.report.has_value();
    os << "tau_db,tau_linear,coverage";
    if (sim) os << ",ci_low,ci_high,trials";
    if (val) os << ",analytic,gap";
    os << '\n';
    const std::vector<double> db = cfg.grid.values_db();
    for (std::size_t i = 0; i < out.thresholds.size(); ++i) {
        os << num(db[i]) << ',' << num(out.thresholds[i]) << ',';
        if (sim) {
            const CoverageEstimate& e = *out.empirical;
            os << num(e.coverage[i]) << ',' << num(e.ci_low(i)) << ',' << num(e.ci_high(i)) << ',' << e.trials;
        } else {
            os << num(out.analytic->coverage[i]);
        }
        if (val) os << ',' << num(out.report->analytic[i]) << ',' << num(out.report->gap[i]);
        os << '\n';
    }
}

json result_json(const RunConfig& cfg, const RunOutput& out)
{
    json doc;
    doc["config"] = to_json(cfg);
    if (out.empirical) doc["config"]["sim"]["window_radius"] = out.window_radius;
    const std::vector<double> db = cfg.grid.values_db();
    json rows = json::array();
    for (std::size_t i = 0; i < out.thresholds.size(); ++i) {
        json row = {{"tau_db", db[i]}, {"tau_linear", out.thresholds[i]}};
        if (out.empirical) {
            const CoverageEstimate& e = *out.empirical;
            row["coverage"] = e.coverage[i];
            row["ci_low"] = e.ci_low(i);
            row["ci_high"] = e.ci_high(i);
            row["ci_half_width"] = e.ci_half_width[i];
            row["trials"] = e.trials;
        } else {
            row["coverage"] = out.analytic->coverage[i];
        }
        if (out.report) {
            row["analytic"] = out.report->analytic[i];
            row["gap"] = out.report->gap[i];
            row["inside_ci"] = static_cast<bool>(out.report->inside_ci[i]);
        }
        rows.push_back(row);
    }
    doc["rows"] = rows;
    if (out.empirical && !out.empirical->tier_counts.empty()) {
        doc["tier_counts"] = out.empirical->tier_counts;
        if (out.empirical->max_covering_count >= 0) doc["max_covering_count"] = out.empirical->max_covering_count;
    }
    if (out.report) {
        doc["validation"] = {{"max_gap", out.report->max_gap},
                             {"fraction_inside_ci", out.report->fraction_inside_ci},
                             {"tolerance", out.report->tolerance},
                             {"pass", out.report->pass}};
    }
    return doc;
}

}  // namespace sgcov::cli
