#include "sgcov/sim.hpp"

#include "sgcov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace sgcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxAttempts = 10;

void require_alpha(double alpha)
{
    if (!(alpha > 2.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("path-loss exponent alpha must exceed 2");
    }
}

double min_bs_radius(double lambda, double min_expected_bs)
{
    return std::sqrt(min_expected_bs / (kPi * lambda));
}

// Typical serving distance used as the inner edge of the reference
// interference: the mean nearest-BS distance 1 / (2 sqrt(lambda)).
double typical_serving_distance(double lambda)
{
    return 0.5 / std::sqrt(lambda);
}

// Expected interference from beyond radius r for unit-power points with
// mean power factor m1.
double tail_mean(double lambda, double alpha, double r, double m1)
{
    return 2.0 * kPi * lambda * m1 / (alpha - 2.0) * std::pow(r, 2.0 - alpha);
}

[[noreturn]] void empty_window_failure(const char* scenario, double radius)
{
    throw std::runtime_error(std::string(scenario) + " simulation drew an empty window " +
                             std::to_string(kMaxAttempts) + " times in a row (window radius " +
                             std::to_string(radius) + "); check the density and window settings");
}

struct Accumulator {
    std::vector<std::uint64_t> hist;
    std::vector<std::uint64_t> tier_counts;
    int max_covering = 0;
};

// Runs trials [0, cfg.trials) in contiguous chunks, one per worker. Counts are
// integers, so the merge is exact and independent of the thread count.
template <class TrialFn>
CoverageEstimate run_trials(const SimConfig& cfg, std::size_t tiers, const TrialFn& trial)
{
    const std::vector<double>& grid = cfg.threshold_grid;
    const std::uint64_t n = cfg.trials;
    unsigned workers = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
    if (workers == 0) workers = 1;
    if (workers > n) workers = static_cast<unsigned>(n);

    std::vector<Accumulator> acc(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        Accumulator& a = acc[w];
        a.hist.assign(grid.size() + 1, 0);
        a.tier_counts.assign(tiers, 0);
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        try {
            for (std::uint64_t t = begin; t < end; ++t) {
                const TrialOutcome out = trial(t);
                const auto below = std::lower_bound(grid.begin(), grid.end(), out.statistic) - grid.begin();
                ++a.hist[static_cast<std::size_t>(below)];
                if (out.serving_tier < tiers) ++a.tier_counts[out.serving_tier];
                a.max_covering = std::max(a.max_covering, out.covering_count);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    CoverageEstimate est;
    est.thresholds = grid;
    est.trials = n;
    est.tier_counts.assign(tiers, 0);
    std::vector<std::uint64_t> hist(grid.size() + 1, 0);
    int max_covering = 0;
    for (const Accumulator& a : acc) {
        for (std::size_t k = 0; k < hist.size(); ++k) hist[k] += a.hist[k];
        for (std::size_t k = 0; k < tiers; ++k) est.tier_counts[k] += a.tier_counts[k];
        max_covering = std::max(max_covering, a.max_covering);
    }
    est.max_covering_count = max_covering;

    // A trial whose statistic exceeds k grid values covers grid points 0..k-1.
    est.successes.assign(grid.size(), 0);
    std::uint64_t running = 0;
    for (std::size_t j = grid.size(); j-- > 0;) {
        running += hist[j + 1];
        est.successes[j] = running;
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double p = static_cast<double>(est.successes[j]) / static_cast<double>(n);
        est.coverage.push_back(p);
        est.ci_half_width.push_back(1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
    }
    return est;
}

}  // namespace

void SimConfig::validate() const
{
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!(truncation_fraction > 0.0 && truncation_fraction <= 0.1)) {
        throw std::invalid_argument("truncation_fraction must lie in (0, 0.1]");
    }
    if (!(min_expected_bs > 0.0) || !std::isfinite(min_expected_bs)) {
        throw std::invalid_argument("min_expected_bs must be positive");
    }
    if (threshold_grid.empty()) throw std::invalid_argument("threshold grid is empty");
    for (std::size_t i = 0; i < threshold_grid.size(); ++i) {
        const double t = threshold_grid[i];
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("threshold grid values must be positive");
        if (i > 0 && !(t > threshold_grid[i - 1])) {
            throw std::invalid_argument("threshold grid must be strictly increasing");
        }
    }
}

double CoverageEstimate::ci_low(std::size_t i) const
{
    return std::max(0.0, coverage.at(i) - ci_half_width.at(i));
}

double CoverageEstimate::ci_high(std::size_t i) const
{
    return std::min(1.0, coverage.at(i) + ci_half_width.at(i));
}

bool CoverageEstimate::nonincreasing() const
{
    for (std::size_t i = 1; i < coverage.size(); ++i) {
        if (coverage[i] > coverage[i - 1]) return false;
    }
    return true;
}

ValidationReport compare_curves(const CoverageCurve& analytic, const CoverageEstimate& empirical, double tol)
{
    if (analytic.thresholds.size() != analytic.coverage.size()) {
        throw std::invalid_argument("analytic curve has mismatched threshold and coverage lengths");
    }
    if (analytic.thresholds != empirical.thresholds) {
        throw std::invalid_argument("threshold grids of the analytic and empirical curves differ");
    }
    if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
    ValidationReport rep;
    rep.thresholds = analytic.thresholds;
    rep.analytic = analytic.coverage;
    rep.empirical = empirical.coverage;
    rep.ci_half_width = empirical.ci_half_width;
    rep.tolerance = tol;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i) {
        const double g = analytic.coverage[i] - empirical.coverage[i];
        rep.gap.push_back(g);
        rep.max_gap = std::max(rep.max_gap, std::abs(g));
        const bool in = std::abs(g) <= empirical.ci_half_width[i];
        rep.inside_ci.push_back(in);
        if (in) ++inside;
    }
    rep.fraction_inside_ci =
        rep.thresholds.empty() ? 1.0 : static_cast<double>(inside) / static_cast<double>(rep.thresholds.size());
    rep.pass = rep.max_gap <= tol;
    return rep;
}

double choose_window_radius(double lambda, double alpha, double delta, double min_expected_bs)
{
    require_alpha(alpha);
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("truncation fraction must be positive");
    // tail(R) <= delta * (tail(r_bar) - tail(R))  <=>  R^(2-alpha) <= delta / (1 + delta) * r_bar^(2-alpha)
    const double r_bar = typical_serving_distance(lambda);
    const double r_mean = r_bar * std::pow(delta / (1.0 + delta), -1.0 / (alpha - 2.0));
    return std::max(r_mean, min_bs_radius(lambda, min_expected_bs));
}

double compensated_window_radius(double lambda, double alpha, double delta, double min_expected_bs, double m1,
                                 double m2)
{
    require_alpha(alpha);
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("truncation fraction must be positive");
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw std::invalid_argument("power moments must be positive");
    // Var of the exp(1)-faded tail beyond R: 2 pi lambda m2 R^(2 - 2 alpha) / (alpha - 1).
    const double reference = tail_mean(lambda, alpha, typical_serving_distance(lambda), m1);
    const double coeff = std::sqrt(2.0 * kPi * lambda * m2 / (alpha - 1.0));
    const double r_fluct = std::pow(coeff / (delta * reference), 1.0 / (alpha - 1.0));
    return std::max(r_fluct, min_bs_radius(lambda, min_expected_bs));
}

namespace {

struct ShadowMoments {
    double m1 = 1.0;
    double m2 = 1.0;
};

double lognormal_sigma(const std::optional<Shadowing>& shadowing)
{
    if (!shadowing) return 0.0;
    const auto* ln = std::get_if<LognormalShadowing>(&*shadowing);
    if (!ln) {
        throw std::invalid_argument("simulation needs a shadowing distribution; a bare fractional moment "
                                    "only supports the analytic equivalent-density path");
    }
    if (!(ln->sigma_db >= 0.0) || !std::isfinite(ln->sigma_db)) {
        throw std::invalid_argument("lognormal shadowing spread must be finite and >= 0");
    }
    return ln->sigma_db * std::log(10.0) / 10.0;
}

ShadowMoments shadow_moments(double sigma_ln)
{
    return {std::exp(0.5 * sigma_ln * sigma_ln), std::exp(2.0 * sigma_ln * sigma_ln)};
}

}  // namespace

double choose_window_radius(const DownlinkParams& params, const SimConfig& cfg,
                            const std::optional<Shadowing>& shadowing)
{
    params.validate();
    const double delta = cfg.truncation_fraction;
    if (cfg.window_policy == WindowPolicy::mean_bound) {
        return choose_window_radius(params.lambda, params.alpha, delta, cfg.min_expected_bs);
    }
    const ShadowMoments m = shadow_moments(lognormal_sigma(shadowing));
    return compensated_window_radius(params.lambda, params.alpha, delta, cfg.min_expected_bs, m.m1, m.m2);
}

DownlinkSimulator::DownlinkSimulator(DownlinkParams params, SimConfig cfg, std::optional<Shadowing> shadowing)
    : params_(params), cfg_(std::move(cfg))
{
    params_.validate();
    cfg_.validate();
    sigma_ln_ = lognormal_sigma(shadowing);
    shadowed_ = shadowing.has_value();
    radius_ = choose_window_radius(params_, cfg_, shadowing);
    if (cfg_.window_policy == WindowPolicy::compensated) {
        tail_mean_ = params_.p * tail_mean(params_.lambda, params_.alpha, radius_, shadow_moments(sigma_ln_).m1);
    }
}

TrialOutcome DownlinkSimulator::run_trial(std::uint64_t index) const
{
    Rng rng = substream(cfg_.master_seed, index);
    const Window window = Window::disk(radius_);
    const double half_alpha = params_.alpha / 2.0;
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        const PointSample bs = sample_ppp(params_.lambda, window, rng);
        if (bs.empty()) continue;
        const auto& pts = bs.points();
        const std::size_t n = pts.size();
        std::vector<double> received(n);
        std::size_t serving = 0;
        double best = -1.0;
        double serving_d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double fade = rng.exponential();
            const double chi = shadowed_ ? std::exp(sigma_ln_ * rng.normal()) : 1.0;
            const double d2 = pts[j].x * pts[j].x + pts[j].y * pts[j].y;
            const double mean_power = params_.p * chi * std::pow(d2, -half_alpha);
            received[j] = fade * mean_power;
            if (mean_power > best) {
                best = mean_power;
                serving = j;
                serving_d2 = d2;
            }
        }
        double interference = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != serving) interference += received[j];
        }
        interference += tail_mean_;
        TrialOutcome out;
        out.statistic = received[serving] / (params_.sigma2 + interference);
        out.serving_distance = std::sqrt(serving_d2);
        out.interference = interference;
        out.bs_count = n;
        out.attempts = attempt;
        return out;
    }
    empty_window_failure("downlink", radius_);
}

CoverageEstimate DownlinkSimulator::run() const
{
    CoverageEstimate est = run_trials(cfg_, 0, [this](std::uint64_t t) { return run_trial(t); });
    est.window_radius = radius_;
    est.max_covering_count = -1;
    return est;
}

UplinkSimulator::UplinkSimulator(UplinkParams params, double lambda_u, SimConfig cfg)
    : params_(params), lambda_u_(lambda_u), cfg_(std::move(cfg))
{
    params_.validate();
    cfg_.validate();
    if (!(lambda_u_ > 0.0) || !std::isfinite(lambda_u_)) throw std::invalid_argument("user density lambda_u must be positive");
    if (lambda_u_ < 10.0 * params_.lambda) {
        std::clog << "warning: user density " << lambda_u_ << " is below 10x the BS density; many cells will be "
                  << "empty and the one-active-user-per-BS assumption weakens\n";
    }
    const double power_exp = params_.alpha * params_.epsilon;
    const double scale = kPi * params_.lambda;
    // E[R^(alpha eps)] and E[R^(2 alpha eps)] under the Rayleigh link-distance law.
    const double m1 = std::tgamma(1.0 + power_exp / 2.0) * std::pow(scale, -power_exp / 2.0);
    const double m2 = std::tgamma(1.0 + power_exp) * std::pow(scale, -power_exp);
    if (cfg_.window_policy == WindowPolicy::mean_bound) {
        radius_ = choose_window_radius(params_.lambda, params_.alpha, cfg_.truncation_fraction, cfg_.min_expected_bs);
    } else {
        radius_ = compensated_window_radius(params_.lambda, params_.alpha, cfg_.truncation_fraction,
                                            cfg_.min_expected_bs, m1, m2);
        tail_mean_ = params_.p * tail_mean(params_.lambda, params_.alpha, radius_, m1);
    }
}

TrialOutcome UplinkSimulator::run_trial(std::uint64_t index) const
{
    Rng rng = substream(cfg_.master_seed, index);
    const Window window = Window::disk(radius_);
    const double alpha = params_.alpha;
    const double eps = params_.epsilon;
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        const PointSample bs = sample_ppp(params_.lambda, window, rng);
        if (bs.empty()) continue;
        const PointSample users = sample_ppp(lambda_u_, window, rng);
        const auto& sites = bs.points();
        const NearestSiteIndex index_(sites);
        const auto [tagged, tagged_d2] = index_.nearest(Point{0.0, 0.0});

        // Users are i.i.d. uniform, so the first one to land in a cell is a
        // uniform pick among that cell's users.
        constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> active(sites.size(), kNone);
        const auto& upts = users.points();
        for (std::size_t u = 0; u < upts.size(); ++u) {
            const std::size_t b = index_.nearest(upts[u]).first;
            if (active[b] == kNone) active[b] = u;
        }

        const double fade = rng.exponential();
        const double signal = fade * params_.p * std::pow(tagged_d2, alpha * (eps - 1.0) / 2.0);
        const Point rx = sites[tagged];
        double interference = 0.0;
        for (std::size_t b = 0; b < sites.size(); ++b) {
            if (b == tagged || active[b] == kNone) continue;
            const Point u = upts[active[b]];
            const double link_d2 = squared_distance(u, sites[b]);
            const double d2 = squared_distance(u, rx);
            const double g = rng.exponential();
            interference += g * params_.p * std::pow(link_d2, alpha * eps / 2.0) * std::pow(d2, -alpha / 2.0);
        }
        interference += tail_mean_;
        TrialOutcome out;
        out.statistic = signal / (params_.sigma2 + interference);
        out.serving_distance = std::sqrt(tagged_d2);
        out.interference = interference;
        out.bs_count = sites.size();
        out.attempts = attempt;
        return out;
    }
    empty_window_failure("uplink", radius_);
}

CoverageEstimate UplinkSimulator::run() const
{
    CoverageEstimate est = run_trials(cfg_, 0, [this](std::uint64_t t) { return run_trial(t); });
    est.window_radius = radius_;
    est.max_covering_count = -1;
    return est;
}

HetNetSimulator::HetNetSimulator(HetNetParams params, SimConfig cfg) : params_(std::move(params)), cfg_(std::move(cfg))
{
    params_.validate();
    cfg_.validate();
    const double q = 2.0 / params_.alpha;
    const std::size_t k = params_.tiers.size();
    for (std::size_t i = 0; i < k; ++i) {
        const TierSpec& t = params_.tiers[i];
        // Density of the equivalent single tier seen at tier i's power; the
        // windows then line up so that every tier is truncated at the same
        // received mean power.
        double s = 0.0;
        for (const TierSpec& other : params_.tiers) s += other.lambda * std::pow(other.p / t.p, q);
        double r = 0.0;
        if (cfg_.window_policy == WindowPolicy::mean_bound) {
            r = choose_window_radius(s, params_.alpha, cfg_.truncation_fraction, cfg_.min_expected_bs);
        } else {
            r = compensated_window_radius(s, params_.alpha, cfg_.truncation_fraction, cfg_.min_expected_bs);
        }
        radii_.push_back(r);
        const double tail =
            cfg_.window_policy == WindowPolicy::compensated ? t.p * tail_mean(t.lambda, params_.alpha, r, 1.0) : 0.0;
        tail_mean_.push_back(tail);
        tail_total_ += tail;
    }
}

TrialOutcome HetNetSimulator::run_trial(std::uint64_t index) const
{
    Rng rng = substream(cfg_.master_seed, index);
    const double half_alpha = params_.alpha / 2.0;
    const std::size_t k = params_.tiers.size();
    struct Bs {
        std::size_t tier;
        double d2;
        double mean_power;
        double received;
    };
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        std::vector<Bs> all;
        for (std::size_t i = 0; i < k; ++i) {
            const TierSpec& t = params_.tiers[i];
            const PointSample pts = sample_ppp(t.lambda, Window::disk(radii_[i]), rng);
            for (const Point& x : pts.points()) {
                const double fade = rng.exponential();
                const double d2 = x.x * x.x + x.y * x.y;
                const double mean_power = t.p * std::pow(d2, -half_alpha);
                all.push_back({i, d2, mean_power, fade * mean_power});
            }
        }
        if (all.empty()) continue;

        TrialOutcome out;
        out.bs_count = all.size();
        out.attempts = attempt;
        if (params_.rule == AssociationRule::average_power) {
            std::size_t serving = 0;
            for (std::size_t j = 1; j < all.size(); ++j) {
                if (all[j].mean_power > all[serving].mean_power) serving = j;
            }
            double interference = 0.0;
            for (std::size_t j = 0; j < all.size(); ++j) {
                if (j != serving) interference += all[j].received;
            }
            interference += tail_total_;
            const Bs& s = all[serving];
            out.statistic = s.received / (params_.sigma2 + interference) / params_.tiers[s.tier].tau;
            out.serving_distance = std::sqrt(s.d2);
            out.serving_tier = s.tier;
            out.interference = interference;
            return out;
        }

        double total = tail_total_;
        for (const Bs& b : all) total += b.received;
        std::size_t best = 0;
        double best_ratio = -1.0;
        for (std::size_t j = 0; j < all.size(); ++j) {
            const double others = std::max(0.0, total - all[j].received);
            const double sinr = all[j].received / (params_.sigma2 + others);
            const double tau = params_.tiers[all[j].tier].tau;
            if (sinr > tau) ++out.covering_count;
            const double ratio = sinr / tau;
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = j;
            }
        }
        out.statistic = best_ratio;
        out.serving_distance = std::sqrt(all[best].d2);
        out.serving_tier = all[best].tier;
        out.interference = total - all[best].received;
        return out;
    }
    empty_window_failure("hetnet", radii_.empty() ? 0.0 : radii_.front());
}

CoverageEstimate HetNetSimulator::run() const
{
    CoverageEstimate est =
        run_trials(cfg_, params_.tiers.size(), [this](std::uint64_t t) { return run_trial(t); });
    est.window_radius = *std::max_element(radii_.begin(), radii_.end());
    if (params_.rule == AssociationRule::average_power) est.max_covering_count = -1;
    return est;
}

CoverageEstimate simulate_downlink(const DownlinkParams& params, const SimConfig& cfg,
                                   const std::optional<Shadowing>& shadowing)
{
    return DownlinkSimulator(params, cfg, shadowing).run();
}

CoverageEstimate simulate_uplink(const UplinkParams& params, double lambda_u, const SimConfig& cfg)
{
    return UplinkSimulator(params, lambda_u, cfg).run();
}

CoverageEstimate simulate_hetnet(const HetNetParams& params, const SimConfig& cfg)
{
    return HetNetSimulator(params, cfg).run();
}

}  // namespace sgcov
