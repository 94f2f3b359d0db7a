#include "sgcov/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace sgcov {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the center.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

double checked(double y, double x)
{
    if (!std::isfinite(y)) {
        throw QuadratureError("non-finite integrand value at x = " + std::to_string(x),
                              QuadratureResult{std::numeric_limits<double>::quiet_NaN(),
                                               std::numeric_limits<double>::infinity(), 0});
    }
    return y;
}

Segment gauss_kronrod(const Integrand& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f(center), center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double f1 = checked(f(center - dx), center - dx);
        const double f2 = checked(f(center + dx), center + dx);
        kronrod += kKronrodWeights[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

QuadratureResult adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec)
{
    std::vector<Segment> heap;
    heap.reserve(16);
    heap.push_back(gauss_kronrod(f, a, b));
    double value = heap.front().value;
    double error = heap.front().error;
    int subdivisions = 0;

    auto tolerance = [&] { return std::max(spec.rel_tol * std::abs(value), spec.abs_tol); };

    while (error > tolerance()) {
        if (subdivisions >= spec.max_subdivisions) {
            throw QuadratureError("quadrature did not converge within " +
                                      std::to_string(spec.max_subdivisions) + " subdivisions",
                                  QuadratureResult{value, error, subdivisions});
        }
        std::pop_heap(heap.begin(), heap.end());
        const Segment worst = heap.back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("quadrature interval collapsed below machine precision",
                                  QuadratureResult{value, error, subdivisions});
        }
        heap.back() = gauss_kronrod(f, worst.a, mid);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(gauss_kronrod(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end());
        ++subdivisions;

        // Re-sum instead of updating incrementally so the total never drifts.
        value = 0.0;
        error = 0.0;
        for (const Segment& s : heap) {
            value += s.value;
            error += s.error;
        }
    }
    return {value, error, subdivisions};
}

}  // namespace

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec)
{
    spec.validate();
    if (std::isnan(a) || std::isnan(b) || std::isinf(a)) {
        throw std::invalid_argument("integrate: lower limit must be finite");
    }
    if (b == a) return {0.0, 0.0, 0};
    if (b < a) throw std::invalid_argument("integrate: upper limit below lower limit");

    if (std::isinf(b)) {
        const Integrand mapped = [&f, a](double t) {
            const double s = 1.0 - t;
            return f(a + t / s) / (s * s);
        };
        return adaptive(mapped, 0.0, 1.0, spec);
    }
    return adaptive(f, a, b, spec);
}

QuadratureResult integrate_algebraic_tail(const Integrand& f, double a, double beta,
                                          const QuadratureSpec& spec)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("integrate_algebraic_tail: lower limit must be positive");
    }
    if (!(beta > 1.0)) throw std::invalid_argument("integrate_algebraic_tail: beta must exceed 1");
    const double k = 1.0 / (beta - 1.0);
    const Integrand mapped = [&f, a, k](double v) {
        const double x = a * std::pow(v, -k);
        return f(x) * std::pow(v, -k - 1.0);
    };
    QuadratureResult r = integrate(mapped, 0.0, 1.0, spec);
    r.value *= a * k;
    r.error *= a * k;
    return r;
}

double q_function(double x)
{
    if (!std::isfinite(x)) throw std::domain_error("q_function: argument must be finite");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double erfcx(double x)
{
    if (std::isnan(x)) return x;
    if (x < 20.0) return std::exp(x * x) * std::erfc(x);
    // Continued fraction: erfc(x) e^{x^2} sqrt(pi) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    double tail = x;
    for (int n = 60; n >= 1; --n) tail = x + 0.5 * n / tail;
    return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

double power_tail_integral(double lower, double beta, const QuadratureSpec& spec)
{
    if (!(lower >= 0.0)) throw std::invalid_argument("power_tail_integral: lower limit must be >= 0");
    if (!(beta > 1.0)) throw std::invalid_argument("power_tail_integral: beta must exceed 1");
    if (std::isinf(lower)) return 0.0;
    const Integrand f = [beta](double u) { return 1.0 / (1.0 + std::pow(u, beta)); };
    double total = 0.0;
    double start = lower;
    if (lower < 1.0) {
        total += integrate(f, lower, 1.0, spec).value;
        start = 1.0;
    }
    return total + integrate_algebraic_tail(f, start, beta, spec).value;
}

double rho_quadrature(double tau, double alpha, const QuadratureSpec& spec)
{
    if (!(alpha > 2.0)) throw std::invalid_argument("rho: path-loss exponent must exceed 2");
    if (!(tau >= 0.0) || std::isinf(tau)) throw std::invalid_argument("rho: threshold must be finite and >= 0");
    if (tau == 0.0) return 0.0;
    const double scale = std::pow(tau, 2.0 / alpha);
    return scale * power_tail_integral(1.0 / scale, alpha / 2.0, spec);
}

double rho(double tau, double alpha)
{
    if (alpha == 4.0) {
        if (!(tau >= 0.0) || std::isinf(tau)) throw std::invalid_argument("rho: threshold must be finite and >= 0");
        const double root = std::sqrt(tau);
        return root * std::atan(root);
    }
    return rho_quadrature(tau, alpha, QuadratureSpec{1e-12, 1e-300, 200});
}

double zeta_alpha(double alpha)
{
    if (!(alpha > 2.0) || std::isinf(alpha)) throw std::invalid_argument("zeta_alpha: alpha must exceed 2");
    const double pi = std::numbers::pi;
    return (2.0 * pi * pi / alpha) / std::sin(2.0 * pi / alpha);
}

double gauss_exp_integral(double a, double b)
{
    if (!(b > 0.0) || std::isinf(b)) throw std::invalid_argument("gauss_exp_integral: b must be positive");
    if (!std::isfinite(a)) throw std::invalid_argument("gauss_exp_integral: a must be finite");
    const double root_b = std::sqrt(b);
    return 0.5 * std::sqrt(std::numbers::pi) / root_b * erfcx(a / (2.0 * root_b));
}

}  // namespace sgcov
