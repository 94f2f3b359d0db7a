#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sgcov {

struct TierSpec {
    double lambda = 1.0;
    double p = 1.0;
    double tau = 1.0;  // linear
};

enum class AssociationRule { average_power, instantaneous_power };

std::string to_string(AssociationRule rule);
AssociationRule parse_association_rule(const std::string& text);

struct HetNetParams {
    std::vector<TierSpec> tiers;
    double alpha = 4.0;
    double sigma2 = 0.0;
    AssociationRule rule = AssociationRule::average_power;

    void validate() const;
    // Throws unless every tau_i > 1, which the instantaneous-power analytics need.
    void require_unique_coverage() const;
};

// sum_j lambda_j p_j^(2/alpha)
double tier_weight_total(const HetNetParams& params);

// Probability that the typical user attaches to tier i under the
// average-power rule.
double association_probability(std::size_t i, const HetNetParams& params);

// Serving-distance density given association with tier i.
double serving_distance_conditional_pdf(double r, std::size_t i, const HetNetParams& params);

// Average-power association, per-tier quadrature.
double hetnet_coverage_avg(const HetNetParams& params);
// Same with sigma2 treated as zero, closed form.
double hetnet_coverage_avg_nonoise(const HetNetParams& params);

// Instantaneous-power association; all tau_i > 1.
double hetnet_coverage_inst(const HetNetParams& params);
double hetnet_coverage_inst_nonoise(const HetNetParams& params);

}  // namespace sgcov
