#include "sgcov/downlink.hpp"

#include "sgcov/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sgcov {

namespace {

constexpr double kPi = std::numbers::pi;
const QuadratureSpec kTight{1e-11, 1e-300, 200};

void require_alpha(double alpha)
{
    if (!(alpha > 2.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("path-loss exponent alpha must exceed 2");
    }
}

void require_tau(double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("threshold tau must be positive and finite");
}

}  // namespace

double DownlinkParams::snr() const
{
    return sigma2 == 0.0 ? std::numeric_limits<double>::infinity() : p / sigma2;
}

void DownlinkParams::validate() const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("p must be positive");
    require_alpha(alpha);
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be >= 0");
}

double mean_interference_annulus(double lambda, double p, double alpha, double a, double b)
{
    if (!(lambda > 0.0) || !(p > 0.0)) throw std::invalid_argument("lambda and p must be positive");
    if (!(a > 0.0)) {
        throw std::invalid_argument("mean interference diverges: inner radius a must be positive "
                                    "(singular path loss at the origin)");
    }
    if (!(b >= a)) throw std::invalid_argument("outer radius b must be >= a");
    if (std::isinf(b)) {
        if (!(alpha > 2.0)) {
            throw std::invalid_argument("mean interference over an unbounded plane diverges for alpha <= 2");
        }
        return 2.0 * kPi * lambda * p / (alpha - 2.0) * std::pow(a, 2.0 - alpha);
    }
    if (b == a) return 0.0;
    // (a^{2-alpha} - b^{2-alpha}) / (alpha - 2), stable through alpha = 2.
    const double log_ratio = std::log(b / a);
    const double k = 2.0 - alpha;
    const double shape = (k == 0.0) ? log_ratio : -std::pow(a, k) * std::expm1(k * log_ratio) / (alpha - 2.0);
    return 2.0 * kPi * lambda * p * shape;
}

double laplace_interference(double s, double lambda, double p, double alpha, double r_excl, Fading fading)
{
    require_alpha(alpha);
    if (!(lambda > 0.0) || !(p > 0.0)) throw std::invalid_argument("lambda and p must be positive");
    if (!(s >= 0.0)) throw std::invalid_argument("Laplace argument s must be >= 0");
    if (!(r_excl >= 0.0)) throw std::invalid_argument("exclusion radius must be >= 0");
    if (s == 0.0) return 1.0;

    // Substituting w = x^2 / (s p)^{2/alpha} leaves an integral in w alone.
    const double scale = std::pow(s * p, 2.0 / alpha);
    const double lower = r_excl * r_excl / scale;
    const double beta = alpha / 2.0;
    double integral = 0.0;
    if (fading == Fading::rayleigh) {
        if (alpha == 4.0 && r_excl == 0.0) return std::exp(-kPi * kPi * lambda * std::sqrt(s * p) / 2.0);
        integral = power_tail_integral(lower, beta, kTight);
    } else {
        if (alpha == 4.0 && r_excl == 0.0) return std::exp(-kPi * lambda * std::sqrt(kPi * s * p));
        const Integrand f = [beta](double w) { return -std::expm1(-std::pow(w, -beta)); };
        double start = lower;
        if (lower < 1.0) {
            integral += integrate(f, lower, 1.0, kTight).value;
            start = 1.0;
        }
        integral += integrate_algebraic_tail(f, start, beta, kTight).value;
    }
    return std::exp(-kPi * lambda * scale * integral);
}

double coverage_general(double tau, const DownlinkParams& params)
{
    params.validate();
    require_tau(tau);
    const double kappa = 1.0 + rho(tau, params.alpha);
    // Normalizing v by pi lambda kappa leaves exp(-w) times the noise factor.
    const double noise_coeff = tau * params.sigma2 / params.p;
    const double unit = kPi * params.lambda * kappa;
    const double half_alpha = params.alpha / 2.0;
    const Integrand f = [&](double w) {
        const double noise = noise_coeff == 0.0 ? 0.0 : noise_coeff * std::pow(w / unit, half_alpha);
        return std::exp(-w - noise);
    };
    return integrate(f, 0.0, std::numeric_limits<double>::infinity(), kTight).value / kappa;
}

double coverage_alpha4_snr(double tau, double lambda, double snr)
{
    require_tau(tau);
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
    const double kappa = 1.0 + rho(tau, 4.0);
    if (std::isinf(snr)) return 1.0 / kappa;
    const double a = kPi * lambda * kappa;
    return kPi * lambda * gauss_exp_integral(a, tau / snr);
}

double coverage_interflimited(double tau, double alpha)
{
    require_alpha(alpha);
    require_tau(tau);
    return 1.0 / (1.0 + rho(tau, alpha));
}

double shadowing_fractional_moment(double alpha, const Shadowing& shadowing)
{
    require_alpha(alpha);
    double moment = 0.0;
    if (const auto* ln = std::get_if<LognormalShadowing>(&shadowing)) {
        if (!(ln->sigma_db >= 0.0) || !std::isfinite(ln->sigma_db)) {
            throw std::invalid_argument("lognormal shadowing spread must be finite and >= 0");
        }
        const double sigma = ln->sigma_db * std::log(10.0) / 10.0;
        const double q = 2.0 / alpha;
        moment = std::exp(0.5 * q * q * sigma * sigma);
    } else {
        moment = std::get<FractionalMoment>(shadowing).value;
    }
    if (!(moment > 0.0) || !std::isfinite(moment)) {
        throw std::invalid_argument("shadowing fractional moment E[chi^(2/alpha)] must be finite and positive");
    }
    return moment;
}

double shadowing_equivalent_density(double lambda, double alpha, const Shadowing& shadowing)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return lambda * shadowing_fractional_moment(alpha, shadowing);
}

}  // namespace sgcov
