#include "sgcov/uplink.hpp"

#include "sgcov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances for the three nesting levels; each inner level is 10x tighter.
const QuadratureSpec kCoverageSpec{1e-6, 1e-12, 200};
const QuadratureSpec kNuSpec{1e-7, 1e-12, 200};
const QuadratureSpec kInnerSpec{1e-8, 1e-15, 200};

double logistic_tail(double z)
{
    // 1 / (1 + e^z) without overflow.
    if (z > 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

// exp(-2 int_0^inf x int_0^{x^2} e^{-u} / (1 + K x^alpha u^{-alpha eps / 2}) du dx),
// the Laplace transform in coordinates normalized by pi * lambda.
double normalized_laplace(double k, double alpha, double epsilon)
{
    if (std::isinf(k)) return 1.0;
    if (!(k > 0.0)) throw std::invalid_argument("uplink Laplace: argument must be positive");
    const double log_k = std::log(k);
    const double u_power = alpha * epsilon / 2.0;
    // e^{-u} is below 1e-40 beyond this point relative to the peak of u^{alpha eps/2} e^{-u}.
    const double u_cap = 100.0 + alpha;

    const Integrand outer = [&](double x) {
        if (x == 0.0) return 0.0;
        const double log_x_term = log_k + alpha * std::log(x);
        double inner_value = 0.0;
        if (epsilon == 0.0) {
            inner_value = -std::expm1(-x * x) * logistic_tail(log_x_term);
        } else {
            const Integrand inner = [&](double u) {
                return std::exp(-u) * logistic_tail(log_x_term - u_power * std::log(u));
            };
            try {
                inner_value = integrate(inner, 0.0, std::min(x * x, u_cap), kInnerSpec).value;
            } catch (const QuadratureError& e) {
                throw QuadratureError(std::string("uplink Laplace inner (link-distance) integral: ") + e.what(),
                                      e.best());
            }
        }
        return 2.0 * x * inner_value;
    };

    try {
        const double exponent = integrate(outer, 0.0, kInf, kNuSpec).value;
        return std::exp(-exponent);
    } catch (const QuadratureError& e) {
        const std::string what = e.what();
        if (what.rfind("uplink Laplace inner", 0) == 0) throw;
        throw QuadratureError("uplink Laplace outer (interferer-distance) integral: " + what, e.best());
    }
}

void require_tau(double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("threshold tau must be positive and finite");
}

}  // namespace

void UplinkParams::validate() const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("p must be positive");
    if (!(alpha > 2.0) || !std::isfinite(alpha)) throw std::invalid_argument("path-loss exponent alpha must exceed 2");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("power-control fraction epsilon must lie in [0, 1]");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be >= 0");
}

double interferer_intensity(double d, double lambda)
{
    if (!(d >= 0.0)) throw std::invalid_argument("interferer distance must be >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return -lambda * std::expm1(-kPi * lambda * d * d);
}

double conditional_link_distance_pdf(double r, double d_i, double lambda)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(d_i > 0.0)) throw std::invalid_argument("truncation distance must be positive");
    if (!(r >= 0.0) || r > d_i) throw std::invalid_argument("link distance must lie in [0, d_i]");
    const double mass = -std::expm1(-kPi * lambda * d_i * d_i);
    return 2.0 * kPi * lambda * r * std::exp(-lambda * kPi * r * r) / mass;
}

double uplink_laplace(double s, const UplinkParams& params)
{
    params.validate();
    if (!(s >= 0.0)) throw std::invalid_argument("Laplace argument s must be >= 0");
    if (s == 0.0) return 1.0;
    const double k = std::pow(kPi * params.lambda, params.alpha * (params.epsilon - 1.0) / 2.0) / (s * params.p);
    return normalized_laplace(k, params.alpha, params.epsilon);
}

double uplink_nu(double r, double tau, const UplinkParams& params)
{
    params.validate();
    require_tau(tau);
    if (!(r > 0.0)) throw std::invalid_argument("link distance r must be positive");
    const double r_norm = r * std::sqrt(kPi * params.lambda);
    const double k = std::pow(r_norm, -params.alpha * (1.0 - params.epsilon)) / tau;
    return normalized_laplace(k, params.alpha, params.epsilon);
}

double uplink_coverage(double tau, const UplinkParams& params)
{
    params.validate();
    require_tau(tau);
    const double alpha = params.alpha;
    const double eps = params.epsilon;
    const double noise_coeff = tau * params.sigma2 / params.p;
    const double link_power = alpha * (1.0 - eps) / 2.0;
    const double unit = kPi * params.lambda;

    // With full inversion the Laplace factor does not depend on r.
    const double nu_fixed = (eps == 1.0) ? normalized_laplace(1.0 / tau, alpha, eps) : kInf;

    // w = pi lambda r^2.
    const Integrand f = [&](double w) {
        const double noise = noise_coeff == 0.0 ? 0.0 : noise_coeff * std::pow(w / unit, link_power);
        const double base = std::exp(-w - noise);
        if (base == 0.0) return 0.0;
        const double nu = (eps == 1.0) ? nu_fixed : normalized_laplace(std::pow(w, -link_power) / tau, alpha, eps);
        return base * nu;
    };
    try {
        return integrate(f, 0.0, kInf, kCoverageSpec).value;
    } catch (const QuadratureError& e) {
        throw QuadratureError(std::string("uplink coverage: ") + e.what(), e.best());
    }
}

double uplink_coverage_full_inversion(double tau, double alpha)
{
    require_tau(tau);
    if (!(alpha > 2.0)) throw std::invalid_argument("path-loss exponent alpha must exceed 2");
    return std::exp(-rho(tau, alpha));
}

}  // namespace sgcov
