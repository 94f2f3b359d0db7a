#pragma once

namespace sgcov {

// Uplink with distance-proportional fractional power control: a user at
// link distance R transmits p * R^(alpha * epsilon).
struct UplinkParams {
    double lambda = 1.0;
    double p = 1.0;
    double alpha = 4.0;
    double epsilon = 1.0;
    double sigma2 = 0.0;

    void validate() const;
};

// Intensity, seen from the tagged BS, of interfering users at distance d:
// lambda * (1 - exp(-pi lambda d^2)).
double interferer_intensity(double d, double lambda);

// Rayleigh link-distance law truncated to [0, d_i].
double conditional_link_distance_pdf(double r, double d_i, double lambda);

// E[exp(-s I)] under the active-user PPP model with truncated-Rayleigh
// link distances (nested quadrature).
double uplink_laplace(double s, const UplinkParams& params);

// Laplace factor of the coverage integrand at tagged-link distance r,
// i.e. uplink_laplace(tau * r^(alpha (1 - epsilon)) / p).
double uplink_nu(double r, double tau, const UplinkParams& params);

// P[SINR > tau] at the tagged BS.
double uplink_coverage(double tau, const UplinkParams& params);

// Full channel inversion without noise: exp(-rho(tau, alpha)).
double uplink_coverage_full_inversion(double tau, double alpha);

}  // namespace sgcov
