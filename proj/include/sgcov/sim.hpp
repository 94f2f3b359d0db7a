#pragma once

#include "sgcov/downlink.hpp"
#include "sgcov/hetnet.hpp"
#include "sgcov/point_process.hpp"
#include "sgcov/uplink.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace sgcov {

// mean_bound: the window alone keeps the expected out-of-window
// interference below delta times the in-window mean; nothing is added back.
// compensated: the expected out-of-window interference is added to every
// trial, and the window only has to make the fluctuation of that tail
// (its standard deviation) small against the same reference.
enum class WindowPolicy { mean_bound, compensated };

struct SimConfig {
    std::uint64_t trials = 10000;
    double truncation_fraction = 1e-3;
    std::uint64_t master_seed = 1;
    std::vector<double> threshold_grid = {1.0};
    double min_expected_bs = 500.0;
    WindowPolicy window_policy = WindowPolicy::compensated;
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct CoverageEstimate {
    std::vector<double> thresholds;
    std::vector<double> coverage;
    std::vector<double> ci_half_width;
    std::vector<std::uint64_t> successes;
    std::uint64_t trials = 0;
    double window_radius = 0.0;
    // HetNet only: trials per serving tier, and the largest number of BSs
    // meeting their own tier threshold in any single trial.
    std::vector<std::uint64_t> tier_counts;
    int max_covering_count = -1;

    double ci_low(std::size_t i) const;
    double ci_high(std::size_t i) const;
    bool nonincreasing() const;
};

struct CoverageCurve {
    std::vector<double> thresholds;
    std::vector<double> coverage;
};

struct ValidationReport {
    std::vector<double> thresholds;
    std::vector<double> analytic;
    std::vector<double> empirical;
    std::vector<double> gap;  // analytic - empirical
    std::vector<double> ci_half_width;
    std::vector<bool> inside_ci;
    double max_gap = 0.0;
    double fraction_inside_ci = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

ValidationReport compare_curves(const CoverageCurve& analytic, const CoverageEstimate& empirical, double tol);

// Literal mean-bound radius: max of r_bar * (delta / (1 + delta))^(-1/(alpha-2))
// with r_bar = 1 / (2 sqrt(lambda)), and sqrt(min_expected_bs / (pi lambda)).
double choose_window_radius(double lambda, double alpha, double delta, double min_expected_bs = 500.0);

// Fluctuation-bound radius for a shot noise whose per-point power has
// moments E[P] = m1 and E[P^2] = m2 (unit reference power).
double compensated_window_radius(double lambda, double alpha, double delta, double min_expected_bs, double m1 = 1.0,
                                 double m2 = 1.0);

double choose_window_radius(const DownlinkParams& params, const SimConfig& cfg,
                            const std::optional<Shadowing>& shadowing = std::nullopt);

// Diagnostics of one trial.
struct TrialOutcome {
    double statistic = 0.0;  // SINR, or SINR / tau_i for the hetnet
    double serving_distance = 0.0;
    double interference = 0.0;  // including any tail compensation, excluding noise
    std::size_t serving_tier = 0;
    int covering_count = 0;  // hetnet: BSs with SINR > tau_i
    std::size_t bs_count = 0;
    int attempts = 1;
};

class DownlinkSimulator {
public:
    DownlinkSimulator(DownlinkParams params, SimConfig cfg, std::optional<Shadowing> shadowing = std::nullopt);

    double window_radius() const { return radius_; }
    TrialOutcome run_trial(std::uint64_t index) const;
    CoverageEstimate run() const;

private:
    DownlinkParams params_;
    SimConfig cfg_;
    double sigma_ln_ = 0.0;
    bool shadowed_ = false;
    double radius_ = 0.0;
    double tail_mean_ = 0.0;
};

class UplinkSimulator {
public:
    UplinkSimulator(UplinkParams params, double lambda_u, SimConfig cfg);

    double window_radius() const { return radius_; }
    TrialOutcome run_trial(std::uint64_t index) const;
    CoverageEstimate run() const;

private:
    UplinkParams params_;
    double lambda_u_;
    SimConfig cfg_;
    double radius_ = 0.0;
    double tail_mean_ = 0.0;
};

// Grid values are common multipliers g on the tier thresholds: the estimate
// at g is the coverage with every tau_i replaced by g * tau_i.
class HetNetSimulator {
public:
    HetNetSimulator(HetNetParams params, SimConfig cfg);

    const std::vector<double>& window_radii() const { return radii_; }
    TrialOutcome run_trial(std::uint64_t index) const;
    CoverageEstimate run() const;

private:
    HetNetParams params_;
    SimConfig cfg_;
    std::vector<double> radii_;
    std::vector<double> tail_mean_;
    double tail_total_ = 0.0;
};

CoverageEstimate simulate_downlink(const DownlinkParams& params, const SimConfig& cfg,
                                   const std::optional<Shadowing>& shadowing = std::nullopt);
CoverageEstimate simulate_uplink(const UplinkParams& params, double lambda_u, const SimConfig& cfg);
CoverageEstimate simulate_hetnet(const HetNetParams& params, const SimConfig& cfg);

}  // namespace sgcov
