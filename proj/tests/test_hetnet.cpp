#include "sgcov/downlink.hpp"
#include "sgcov/hetnet.hpp"
#include "sgcov/numerics.hpp"
#include "sgcov/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace sgcov;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

HetNetParams three_tier(double tau, AssociationRule rule = AssociationRule::average_power)
{
    HetNetParams p;
    p.tiers = {{1e-6, 100.0, tau}, {1e-5, 10.0, tau}, {1e-4, 1.0, tau}};
    p.alpha = 4.0;
    p.rule = rule;
    return p;
}

// Association probability from its integral form: the typical user picks
// tier i when its nearest tier-i BS at r beats every other tier j, i.e. no
// tier-j BS lies within (p_j / p_i)^(1/alpha) r.
double association_oracle(std::size_t i, const HetNetParams& p)
{
    const TierSpec& t = p.tiers[i];
    auto f = [&](double r) {
        double others = 1.0;
        for (std::size_t j = 0; j < p.tiers.size(); ++j) {
            if (j == i) continue;
            const double e = std::pow(p.tiers[j].p / t.p, 1.0 / p.alpha) * r;
            others *= std::exp(-kPi * p.tiers[j].lambda * e * e);
        }
        return 2 * kPi * t.lambda * r * std::exp(-kPi * t.lambda * r * r) * others;
    };
    double total = 0.0;
    for (const TierSpec& s : p.tiers) total += s.lambda;
    const double reach = 12.0 / std::sqrt(kPi * total * 1e-3);
    return simpson(f, 0.0, reach, 200000);
}

// Per-tier coverage integral in physical units, as an oracle for the
// normalized quadrature used by the library.
double avg_coverage_oracle(const HetNetParams& p)
{
    double total = 0.0;
    for (std::size_t i = 0; i < p.tiers.size(); ++i) {
        const TierSpec& t = p.tiers[i];
        double s = 0.0;
        for (const TierSpec& o : p.tiers) s += o.lambda * std::pow(o.p / t.p, 2.0 / p.alpha);
        const double k = s * (1 + rho(t.tau, p.alpha));
        auto f = [&](double r) {
            return 2 * kPi * t.lambda * r * std::exp(-t.tau * p.sigma2 * std::pow(r, p.alpha) / t.p) *
                   std::exp(-kPi * r * r * k);
        };
        total += simpson(f, 0.0, 10.0 / std::sqrt(kPi * k), 20000);
    }
    return total;
}

}  // namespace

TEST_CASE("association probability, closed form against its integral")
{
    HetNetParams two;
    two.tiers = {{1.0, 100.0, 1.0}, {10.0, 1.0, 1.0}};
    CHECK(association_probability(0, two) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(association_probability(1, two) == doctest::Approx(0.5).epsilon(1e-14));

    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        HetNetParams p;
        p.alpha = 2.5 + 3 * rng.uniform();
        const int k = 1 + static_cast<int>(rng.uniform() * 4);
        for (int i = 0; i < k; ++i) p.tiers.push_back({std::pow(10.0, -2 * rng.uniform()), std::pow(10.0, 2 * rng.uniform()), 1.0});
        double sum = 0.0;
        for (std::size_t i = 0; i < p.tiers.size(); ++i) {
            const double a = association_probability(i, p);
            CHECK(a == doctest::Approx(association_oracle(i, p)).epsilon(1e-7));
            sum += a;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        // Invariant to scaling every power.
        HetNetParams q = p;
        for (TierSpec& t : q.tiers) t.p *= 37.0;
        CHECK(association_probability(0, q) == doctest::Approx(association_probability(0, p)).epsilon(1e-12));
    }
    HetNetParams one;
    one.tiers = {{3.0, 2.0, 1.0}};
    CHECK(association_probability(0, one) == 1.0);
    CHECK_THROWS_AS(association_probability(1, one), std::out_of_range);
}

TEST_CASE("conditional serving distance pdf")
{
    HetNetParams one;
    one.tiers = {{2.0, 5.0, 1.0}};
    for (double r : {0.0, 0.2, 0.9}) {
        CHECK(serving_distance_conditional_pdf(r, 0, one) == doctest::Approx(2 * kPi * 2.0 * r * std::exp(-kPi * 2.0 * r * r)));
    }
    const HetNetParams p = three_tier(1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const double mass = simpson([&](double r) { return serving_distance_conditional_pdf(r, i, p); }, 0.0, 3000.0, 200000);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK_THROWS(serving_distance_conditional_pdf(-1.0, 0, p));
}

TEST_CASE("average-power coverage")
{
    // Equal thresholds without noise: 1 / (1 + rho).
    for (double tau : {0.5, 1.0, 4.0}) {
        const double expected = 1.0 / (1.0 + rho(tau, 4.0));
        CHECK(std::abs(hetnet_coverage_avg(three_tier(tau)) - expected) < 1e-10);
        CHECK(std::abs(hetnet_coverage_avg_nonoise(three_tier(tau)) - expected) < 1e-12);
    }
    // Distinct thresholds: per-tier closed form.
    HetNetParams p = three_tier(1.0);
    p.tiers[0].tau = 0.5;
    p.tiers[2].tau = 8.0;
    CHECK(std::abs(hetnet_coverage_avg(p) - hetnet_coverage_avg_nonoise(p)) < 1e-8);
    // With noise, against the physical-units integral.
    p.sigma2 = 1e-9;
    CHECK(hetnet_coverage_avg(p) == doctest::Approx(avg_coverage_oracle(p)).epsilon(1e-8));
    CHECK(hetnet_coverage_avg(p) < hetnet_coverage_avg_nonoise(p));
}

TEST_CASE("single tier reduces to the downlink result")
{
    for (double sigma2 : {0.0, 0.05, 1.0}) {
        for (double tau : {0.3, 1.0, 7.0}) {
            HetNetParams p;
            p.tiers = {{1.7, 2.0, tau}};
            p.alpha = 3.3;
            p.sigma2 = sigma2;
            const DownlinkParams d{1.7, 2.0, 3.3, sigma2};
            CHECK(hetnet_coverage_avg(p) == doctest::Approx(coverage_general(tau, d)).epsilon(1e-6));
        }
    }
}

TEST_CASE("average-power coverage without noise is invariant to common scaling")
{
    HetNetParams p = three_tier(1.0);
    p.tiers[1].tau = 3.0;
    const double base = hetnet_coverage_avg(p);
    HetNetParams q = p;
    for (TierSpec& t : q.tiers) {
        t.lambda *= 5.0;
        t.p *= 0.01;
    }
    CHECK(hetnet_coverage_avg(q) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("instantaneous-power coverage")
{
    const HetNetParams p = three_tier(2.0, AssociationRule::instantaneous_power);
    CHECK(hetnet_coverage_inst_nonoise(p) == doctest::Approx(2.0 / (kPi * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(std::abs(hetnet_coverage_inst(p) - 0.450158) < 1e-6);
    CHECK(std::abs(hetnet_coverage_inst(p) - hetnet_coverage_inst_nonoise(p)) < 1e-9);

    HetNetParams one;
    one.rule = AssociationRule::instantaneous_power;
    one.tiers = {{1.0, 1.0, 3.0}};
    CHECK(hetnet_coverage_inst_nonoise(one) == doctest::Approx(2.0 / kPi / std::sqrt(3.0)).epsilon(1e-12));

    HetNetParams mixed = p;
    mixed.tiers[0].tau = 1.5;
    mixed.tiers[2].tau = 9.0;
    CHECK(std::abs(hetnet_coverage_inst(mixed) - hetnet_coverage_inst_nonoise(mixed)) < 1e-8);

    // With noise: per-tier integral in physical units.
    mixed.sigma2 = 1e-8;
    const double q = 2.0 / mixed.alpha;
    double base = 0.0;
    for (const TierSpec& t : mixed.tiers) base += t.lambda * std::pow(t.p, q);
    double oracle = 0.0;
    for (const TierSpec& t : mixed.tiers) {
        const double c = std::pow(t.tau / t.p, q) * zeta_alpha(mixed.alpha) * base;
        auto f = [&](double x) {
            return std::exp(-x * x * c) * std::exp(-t.tau * mixed.sigma2 * std::pow(x, mixed.alpha) / t.p) * x;
        };
        oracle += 2 * kPi * t.lambda * simpson(f, 0.0, 10.0 / std::sqrt(c), 20000);
    }
    CHECK(hetnet_coverage_inst(mixed) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("instantaneous-power analytics need every tau above 1")
{
    HetNetParams p = three_tier(2.0, AssociationRule::instantaneous_power);
    p.tiers[1].tau = 0.9;
    try {
        hetnet_coverage_inst(p);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("at most one BS") != std::string::npos);
    }
    p.tiers[1].tau = 1.0;
    CHECK_THROWS_AS(hetnet_coverage_inst_nonoise(p), std::invalid_argument);
    CHECK_THROWS_AS(hetnet_coverage_avg(three_tier(2.0, AssociationRule::instantaneous_power)), std::invalid_argument);
}

TEST_CASE("closed-form instantaneous coverage stays in (0, 1)")
{
    for (double alpha = 2.1; alpha <= 6.0; alpha += 0.3) {
        for (double tau : {1.01, 1.5, 3.0, 30.0}) {
            HetNetParams p;
            p.alpha = alpha;
            p.rule = AssociationRule::instantaneous_power;
            p.tiers = {{1.0, 1.0, tau}, {5.0, 0.1, tau * 1.3}};
            const double c = hetnet_coverage_inst_nonoise(p);
            CAPTURE(alpha);
            CAPTURE(tau);
            CHECK(c > 0.0);
            CHECK(c < 1.0);
        }
    }
}

TEST_CASE("raising a tier threshold lowers coverage")
{
    for (const AssociationRule rule : {AssociationRule::average_power, AssociationRule::instantaneous_power}) {
        HetNetParams p = three_tier(2.0, rule);
        p.sigma2 = 1e-9;
        double prev = 1.0;
        for (double tau = 1.5; tau < 40; tau *= 1.7) {
            p.tiers[1].tau = tau;
            const double c = rule == AssociationRule::average_power ? hetnet_coverage_avg(p) : hetnet_coverage_inst(p);
            CHECK(c >= 0.0);
            CHECK(c <= prev);
            prev = c;
        }
    }
}

TEST_CASE("rule names")
{
    CHECK(parse_association_rule("avg") == AssociationRule::average_power);
    CHECK(parse_association_rule("instantaneous_power") == AssociationRule::instantaneous_power);
    CHECK(to_string(AssociationRule::average_power) == "average_power");
    CHECK_THROWS(parse_association_rule("max"));
    HetNetParams empty;
    CHECK_THROWS(empty.validate());
}
