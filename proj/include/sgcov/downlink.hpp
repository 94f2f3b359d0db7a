#pragma once

#include <variant>

namespace sgcov {

// Single-tier downlink. All thresholds are linear; SNR is the mean received
// SNR at unit distance, p / sigma2, with the reference path loss folded into p.
struct DownlinkParams {
    double lambda = 1.0;
    double p = 1.0;
    double alpha = 4.0;
    double sigma2 = 0.0;

    // +inf when sigma2 == 0.
    double snr() const;
    void validate() const;
};

// Mean interference at the origin from a PPP on the annulus a <= |x| < b
// with constant power p. b may be +inf (requires alpha > 2).
double mean_interference_annulus(double lambda, double p, double alpha, double a, double b);

enum class Fading { rayleigh, none };

// Laplace transform E[exp(-s I)] of the shot noise from a PPP outside a
// disk of radius r_excl. With Rayleigh fading this is
// exp(-2 pi lambda int_r^inf x / (1 + (s p)^-1 x^alpha) dx).
double laplace_interference(double s, double lambda, double p, double alpha, double r_excl,
                            Fading fading = Fading::rayleigh);

// P[SINR > tau] for the typical user served by its nearest BS, Rayleigh
// fading on all links.
double coverage_general(double tau, const DownlinkParams& params);

// alpha = 4 coverage with noise via the Gaussian-exponential integral.
double coverage_alpha4_snr(double tau, double lambda, double snr);

// Interference-limited coverage 1 / (1 + rho(tau, alpha)); density-free.
double coverage_interflimited(double tau, double alpha);

struct LognormalShadowing {
    double sigma_db;  // dB spread of a unit-median lognormal gain
};

struct FractionalMoment {
    double value;  // E[chi^(2/alpha)] supplied directly
};

using Shadowing = std::variant<LognormalShadowing, FractionalMoment>;

// E[chi^(2/alpha)] for the given shadowing law.
double shadowing_fractional_moment(double alpha, const Shadowing& shadowing);

// Density of the shadowing-free PPP with the same coverage:
// lambda * E[chi^(2/alpha)].
double shadowing_equivalent_density(double lambda, double alpha, const Shadowing& shadowing);

}  // namespace sgcov
