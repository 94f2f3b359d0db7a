#include "sgcov/hetnet.hpp"

#include "sgcov/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sgcov {

namespace {

constexpr double kPi = std::numbers::pi;
const QuadratureSpec kTight{1e-11, 1e-300, 200};

void check_index(std::size_t i, const HetNetParams& params)
{
    if (i >= params.tiers.size()) {
        std::ostringstream os;
        os << "tier index " << i << " out of range (k = " << params.tiers.size() << ")";
        throw std::out_of_range(os.str());
    }
}

// S_i = sum_j lambda_j (p_j / p_i)^(2/alpha)
double effective_density(std::size_t i, const HetNetParams& params)
{
    const double q = 2.0 / params.alpha;
    return tier_weight_total(params) / std::pow(params.tiers[i].p, q);
}

// int_0^inf exp(-v - c (v / unit)^(alpha/2)) dv
double noisy_unit_integral(double c, double unit, double alpha)
{
    if (c == 0.0) return 1.0;
    const double half_alpha = alpha / 2.0;
    const Integrand f = [&](double v) { return std::exp(-v - c * std::pow(v / unit, half_alpha)); };
    return integrate(f, 0.0, std::numeric_limits<double>::infinity(), kTight).value;
}

void require_rule(const HetNetParams& params, AssociationRule rule)
{
    if (params.rule != rule) {
        throw std::invalid_argument("hetnet coverage requested for rule " + to_string(rule) +
                                    " but params specify " + to_string(params.rule));
    }
}

}  // namespace

std::string to_string(AssociationRule rule)
{
    return rule == AssociationRule::average_power ? "average_power" : "instantaneous_power";
}

AssociationRule parse_association_rule(const std::string& text)
{
    if (text == "average_power" || text == "avg") return AssociationRule::average_power;
    if (text == "instantaneous_power" || text == "inst") return AssociationRule::instantaneous_power;
    throw std::invalid_argument("unknown association rule '" + text + "' (expected avg or inst)");
}

void HetNetParams::validate() const
{
    if (tiers.empty()) throw std::invalid_argument("hetnet needs at least one tier");
    if (!(alpha > 2.0) || !std::isfinite(alpha)) throw std::invalid_argument("path-loss exponent alpha must exceed 2");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be >= 0");
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const TierSpec& t = tiers[i];
        const bool ok = t.lambda > 0.0 && std::isfinite(t.lambda) && t.p > 0.0 && std::isfinite(t.p) &&
                        t.tau > 0.0 && std::isfinite(t.tau);
        if (!ok) {
            throw std::invalid_argument("tier " + std::to_string(i) + ": lambda, p and tau must be positive and finite");
        }
    }
}

void HetNetParams::require_unique_coverage() const
{
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        if (!(tiers[i].tau > 1.0)) {
            std::ostringstream os;
            os << "instantaneous-power analytics need tau_i > 1 for every tier (tier " << i << " has tau = "
               << tiers[i].tau << "); only then can at most one BS across all k tiers satisfy its threshold";
            throw std::invalid_argument(os.str());
        }
    }
}

double tier_weight_total(const HetNetParams& params)
{
    const double q = 2.0 / params.alpha;
    double total = 0.0;
    for (const TierSpec& t : params.tiers) total += t.lambda * std::pow(t.p, q);
    return total;
}

double association_probability(std::size_t i, const HetNetParams& params)
{
    params.validate();
    check_index(i, params);
    const TierSpec& t = params.tiers[i];
    return t.lambda * std::pow(t.p, 2.0 / params.alpha) / tier_weight_total(params);
}

double serving_distance_conditional_pdf(double r, std::size_t i, const HetNetParams& params)
{
    if (!(r >= 0.0)) throw std::invalid_argument("distance r must be >= 0");
    const double a = association_probability(i, params);
    const double s = effective_density(i, params);
    return 2.0 * kPi * params.tiers[i].lambda * r * std::exp(-kPi * r * r * s) / a;
}

double hetnet_coverage_avg(const HetNetParams& params)
{
    params.validate();
    require_rule(params, AssociationRule::average_power);
    double total = 0.0;
    for (std::size_t i = 0; i < params.tiers.size(); ++i) {
        const TierSpec& t = params.tiers[i];
        const double shaped = effective_density(i, params) * (1.0 + rho(t.tau, params.alpha));
        // v = pi r^2 S_i (1 + rho_i)
        const double integral = noisy_unit_integral(t.tau * params.sigma2 / t.p, kPi * shaped, params.alpha);
        total += t.lambda / shaped * integral;
    }
    return total;
}

double hetnet_coverage_avg_nonoise(const HetNetParams& params)
{
    params.validate();
    const double q = 2.0 / params.alpha;
    const double denom = tier_weight_total(params);
    double total = 0.0;
    for (const TierSpec& t : params.tiers) {
        total += t.lambda * std::pow(t.p, q) / (denom * (1.0 + rho(t.tau, params.alpha)));
    }
    return total;
}

double hetnet_coverage_inst(const HetNetParams& params)
{
    params.validate();
    require_rule(params, AssociationRule::instantaneous_power);
    params.require_unique_coverage();
    const double q = 2.0 / params.alpha;
    const double base = zeta_alpha(params.alpha) * tier_weight_total(params);
    double total = 0.0;
    for (const TierSpec& t : params.tiers) {
        const double c = std::pow(t.tau / t.p, q) * base;
        // v = c x^2
        const double integral = noisy_unit_integral(t.tau * params.sigma2 / t.p, c, params.alpha);
        total += kPi * t.lambda / c * integral;
    }
    return total;
}

double hetnet_coverage_inst_nonoise(const HetNetParams& params)
{
    params.validate();
    params.require_unique_coverage();
    const double q = 2.0 / params.alpha;
    double num = 0.0;
    for (const TierSpec& t : params.tiers) num += t.lambda * std::pow(t.p, q) * std::pow(t.tau, -q);
    return kPi / zeta_alpha(params.alpha) * num / tier_weight_total(params);
}

}  // namespace sgcov
