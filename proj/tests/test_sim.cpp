#include "sgcov/downlink.hpp"
#include "sgcov/hetnet.hpp"
#include "sgcov/sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace sgcov;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> db_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    for (double t = lo; t <= hi + 1e-9; t += step) g.push_back(std::pow(10.0, t / 10.0));
    return g;
}

SimConfig small_config(std::uint64_t trials, std::uint64_t seed = 1)
{
    SimConfig c;
    c.trials = trials;
    c.master_seed = seed;
    c.threshold_grid = db_grid(-10, 20, 5);
    return c;
}

HetNetParams three_tier(double tau, AssociationRule rule)
{
    HetNetParams p;
    p.tiers = {{1e-6, 100.0, tau}, {1e-5, 10.0, tau}, {1e-4, 1.0, tau}};
    p.alpha = 4.0;
    p.rule = rule;
    return p;
}

// Tail beyond R for unit power points at density lambda.
double tail(double lambda, double alpha, double r)
{
    return 2 * kPi * lambda / (alpha - 2) * std::pow(r, 2 - alpha);
}

}  // namespace

TEST_CASE("mean-bound window radius meets its own constraint")
{
    for (double alpha : {2.5, 3.0, 4.0}) {
        for (double delta : {1e-2, 1e-3}) {
            const double lambda = 1.0;
            const double r = choose_window_radius(lambda, alpha, delta, 1e-6);
            const double r_bar = 0.5 / std::sqrt(lambda);
            // Tail beyond R against the in-window mean from r_bar to R.
            const double inside = tail(lambda, alpha, r_bar) - tail(lambda, alpha, r);
            CHECK(tail(lambda, alpha, r) <= delta * inside * (1 + 1e-12));
            CHECK(tail(lambda, alpha, r) == doctest::Approx(delta * inside).epsilon(1e-10));
        }
    }
    // The expected-count floor takes over when it is larger.
    CHECK(choose_window_radius(1.0, 4.0, 1e-3, 2000) == doctest::Approx(std::sqrt(2000 / kPi)));
    CHECK(choose_window_radius(1.0, 4.0, 1e-3, 1e-6) < std::sqrt(2000 / kPi));
    CHECK(choose_window_radius(1.0, 4.0, 1e-3, 1e-6) == doctest::Approx(0.5 * std::sqrt(1001.0)));
    // Smaller delta, bigger window.
    CHECK(choose_window_radius(1.0, 3.0, 1e-4, 1.0) > choose_window_radius(1.0, 3.0, 1e-3, 1.0));
    CHECK(compensated_window_radius(1.0, 3.0, 1e-4, 1.0) > compensated_window_radius(1.0, 3.0, 1e-3, 1.0));
    CHECK_THROWS(choose_window_radius(1.0, 2.0, 1e-3));
    CHECK_THROWS(choose_window_radius(0.0, 4.0, 1e-3));
}

TEST_CASE("compensated window bounds the tail fluctuation")
{
    const double lambda = 2.0, alpha = 3.5, delta = 1e-3, m1 = 1.4, m2 = 3.0;
    const double r = compensated_window_radius(lambda, alpha, delta, 1e-6, m1, m2);
    const double sd = std::sqrt(2 * kPi * lambda * m2 / (alpha - 1)) * std::pow(r, 1 - alpha);
    const double reference = m1 * tail(lambda, alpha, 0.5 / std::sqrt(lambda));
    CHECK(sd == doctest::Approx(delta * reference).epsilon(1e-10));
}

TEST_CASE("downlink simulation is deterministic across thread counts")
{
    SimConfig a = small_config(4000, 7);
    a.threads = 1;
    SimConfig b = a;
    b.threads = 4;
    const DownlinkParams p{1.0, 1.0, 4.0, 0.1};
    const CoverageEstimate x = simulate_downlink(p, a);
    const CoverageEstimate y = simulate_downlink(p, b);
    CHECK(x.successes == y.successes);
    CHECK(x.coverage == y.coverage);
    CHECK(simulate_downlink(p, b).successes == y.successes);
    SimConfig c = b;
    c.master_seed = 8;
    CHECK(simulate_downlink(p, c).successes != y.successes);
}

TEST_CASE("uplink and hetnet simulation are deterministic across thread counts")
{
    SimConfig a = small_config(300, 3);
    a.threads = 1;
    SimConfig b = a;
    b.threads = 3;
    const UplinkParams u{1.0, 1.0, 4.0, 0.5, 0.0};
    CHECK(simulate_uplink(u, 10.0, a).successes == simulate_uplink(u, 10.0, b).successes);
    const HetNetParams h = three_tier(1.0, AssociationRule::average_power);
    const CoverageEstimate x = simulate_hetnet(h, a);
    const CoverageEstimate y = simulate_hetnet(h, b);
    CHECK(x.successes == y.successes);
    CHECK(x.tier_counts == y.tier_counts);
}

TEST_CASE("a single-tier hetnet at unit threshold reproduces the downlink simulator")
{
    const SimConfig cfg = small_config(2000, 11);
    HetNetParams h;
    h.tiers = {{1.0, 2.0, 1.0}};
    h.alpha = 3.5;
    h.sigma2 = 0.05;
    const CoverageEstimate a = simulate_hetnet(h, cfg);
    const CoverageEstimate b = simulate_downlink({1.0, 2.0, 3.5, 0.05}, cfg);
    CHECK(a.successes == b.successes);
    CHECK(a.window_radius == b.window_radius);
}

TEST_CASE("serving distance follows the nearest-neighbour law")
{
    SimConfig cfg = small_config(20000, 5);
    const DownlinkSimulator sim({1.0, 1.0, 4.0, 0.0}, cfg);
    std::vector<double> d;
    d.reserve(cfg.trials);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) d.push_back(sim.run_trial(t).serving_distance);
    std::sort(d.begin(), d.end());
    double ks = 0.0;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double f = 1 - std::exp(-kPi * d[i] * d[i]);
        ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    CHECK(ks <= 0.02);
}

TEST_CASE("hetnet serving tier frequencies match the association probabilities")
{
    SimConfig cfg = small_config(20000, 2);
    const HetNetParams h = three_tier(1.0, AssociationRule::average_power);
    const CoverageEstimate est = simulate_hetnet(h, cfg);
    REQUIRE(est.tier_counts.size() == 3);
    const double n = static_cast<double>(cfg.trials);
    for (std::size_t i = 0; i < 3; ++i) {
        const double a = association_probability(i, h);
        const double freq = static_cast<double>(est.tier_counts[i]) / n;
        CAPTURE(i);
        CHECK(std::abs(freq - a) <= 3 * std::sqrt(a * (1 - a) / n));
    }
}

TEST_CASE("compare_curves")
{
    CoverageEstimate e;
    e.thresholds = {1.0, 2.0};
    e.coverage = {0.5, 0.3};
    e.ci_half_width = {0.01, 0.01};
    const ValidationReport same = compare_curves({{1.0, 2.0}, {0.5, 0.3}}, e, 0.01);
    CHECK(same.max_gap == 0.0);
    CHECK(same.pass);
    CHECK(same.fraction_inside_ci == 1.0);
    const ValidationReport off = compare_curves({{1.0, 2.0}, {0.6, 0.4}}, e, 0.01);
    CHECK(off.max_gap == doctest::Approx(0.1));
    CHECK(off.gap[0] == doctest::Approx(0.1));
    CHECK_FALSE(off.pass);
    CHECK(off.fraction_inside_ci == 0.0);
    CHECK_THROWS(compare_curves({{1.0, 3.0}, {0.5, 0.3}}, e, 0.01));
}

TEST_CASE("estimates are probabilities with valid intervals and nonincreasing curves")
{
    SimConfig cfg = small_config(3000, 4);
    cfg.threshold_grid.insert(cfg.threshold_grid.begin(), 1e-6);
    const CoverageEstimate est = simulate_downlink({1.0, 1.0, 4.0, 0.0}, cfg);
    CHECK(est.coverage.front() >= 0.999);
    CHECK(est.nonincreasing());
    for (std::size_t i = 0; i < est.coverage.size(); ++i) {
        CHECK(est.coverage[i] >= 0.0);
        CHECK(est.coverage[i] <= 1.0);
        CHECK(est.ci_low(i) <= est.coverage[i]);
        CHECK(est.ci_high(i) >= est.coverage[i]);
        const double p = est.coverage[i];
        CHECK(est.ci_half_width[i] == doctest::Approx(1.96 * std::sqrt(p * (1 - p) / 3000.0)));
    }
}

TEST_CASE("instantaneous rule never sees two covering BSs above unit threshold")
{
    SimConfig cfg = small_config(5000, 6);
    cfg.threshold_grid = {1.0, 2.0, 4.0};
    const CoverageEstimate est = simulate_hetnet(three_tier(1.0, AssociationRule::instantaneous_power), cfg);
    CHECK(est.max_covering_count <= 1);
    CHECK(est.max_covering_count >= 0);
    CHECK(est.nonincreasing());
}

TEST_CASE("doubling the window does not move the estimate beyond its noise")
{
    SimConfig a = small_config(20000, 21);
    SimConfig b = a;
    b.master_seed = 22;
    b.min_expected_bs = 4 * a.min_expected_bs;
    const DownlinkParams p{1.0, 1.0, 3.0, 0.0};
    const DownlinkSimulator sa(p, a), sb(p, b);
    CHECK(sb.window_radius() == doctest::Approx(2 * sa.window_radius()));
    const CoverageEstimate x = sa.run();
    const CoverageEstimate y = sb.run();
    for (std::size_t i = 0; i < x.coverage.size(); ++i) {
        CAPTURE(i);
        CHECK(std::abs(x.coverage[i] - y.coverage[i]) <= x.ci_half_width[i] + y.ci_half_width[i]);
    }
}

TEST_CASE("empty windows are redrawn and eventually abort")
{
    SimConfig cfg = small_config(50000, 1);
    cfg.window_policy = WindowPolicy::mean_bound;
    cfg.truncation_fraction = 0.1;
    cfg.min_expected_bs = 1e-3;
    cfg.threads = 1;
    const DownlinkParams p{1.0, 1.0, 200.0, 0.0};
    const DownlinkSimulator sim(p, cfg);
    // Roughly pi / 4 BSs expected per window.
    CHECK(sim.window_radius() == doctest::Approx(0.5).epsilon(1e-2));
    int redrawn = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        if (sim.run_trial(t).attempts > 1) ++redrawn;
    }
    CHECK(redrawn > 0);
    CHECK_THROWS_AS(sim.run(), std::runtime_error);
}

TEST_CASE("uplink with fixed power needs no per-user power draw")
{
    // eps = 0 means every user transmits at p; the estimate is still a valid curve.
    SimConfig cfg = small_config(500, 9);
    const CoverageEstimate est = simulate_uplink({1.0, 1.0, 4.0, 0.0, 0.0}, 10.0, cfg);
    CHECK(est.nonincreasing());
    CHECK(est.coverage.front() > est.coverage.back());
}

TEST_CASE("configuration validation")
{
    SimConfig c;
    c.trials = 0;
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.threshold_grid = {2.0, 1.0};
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.truncation_fraction = 0.0;
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.threshold_grid = {-1.0};
    CHECK_THROWS(c.validate());
    CHECK_THROWS(simulate_downlink({1.0, 1.0, 4.0, 0.0}, SimConfig{}, Shadowing{FractionalMoment{1.2}}));
    CHECK_THROWS(simulate_uplink({1.0, 1.0, 4.0, 1.0, 0.0}, 0.0, SimConfig{}));
}
