#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sgcov {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 200;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

// Raised when adaptive refinement runs out of subdivisions or meets a
// non-finite integrand value. Carries the best estimate reached.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult best)
        : std::runtime_error(what), best_(best) {}

    const QuadratureResult& best() const noexcept { return best_; }

private:
    QuadratureResult best_;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) integration over [a, b]. `b` may be
// +infinity, in which case the domain is mapped onto [0, 1) with
// x = a + t / (1 - t). Refinement stops once the summed |K15 - G7| error is
// below max(rel_tol * |value|, abs_tol).
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});

// Integral over [a, inf) of an integrand decaying like x^-beta (beta > 1),
// computed on the compact variable v = (x / a)^(1 - beta). Requires a > 0.
// The map keeps algebraically decaying integrands bounded at v = 0, which the
// rational map in integrate() does not when beta < 2.
QuadratureResult integrate_algebraic_tail(const Integrand& f, double a, double beta,
                                          const QuadratureSpec& spec = {});

// Standard Gaussian tail probability Q(x) = P[N(0,1) > x].
double q_function(double x);

// Scaled complementary error function exp(x^2) erfc(x), accurate for large x.
double erfcx(double x);

// Integral of 1 / (1 + u^beta) over [lower, inf), beta > 1, lower >= 0.
double power_tail_integral(double lower, double beta, const QuadratureSpec& spec = {});

// rho(tau, alpha) = tau^(2/alpha) * int_{tau^(-2/alpha)}^inf du / (1 + u^(alpha/2)).
// Uses sqrt(tau) * atan(sqrt(tau)) when alpha is exactly 4.
double rho(double tau, double alpha);
// Always evaluates rho by quadrature (no closed-form fast path).
double rho_quadrature(double tau, double alpha, const QuadratureSpec& spec = {});

// zeta(alpha) = (2 pi^2 / alpha) csc(2 pi / alpha).
double zeta_alpha(double alpha);

// int_0^inf exp(-a x - b x^2) dx = sqrt(pi/b) exp(a^2 / 4b) Q(a / sqrt(2b)),
// evaluated through erfcx so that the exp * Q product never overflows.
double gauss_exp_integral(double a, double b);

}  // namespace sgcov
