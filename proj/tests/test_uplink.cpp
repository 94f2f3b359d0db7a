#include "sgcov/numerics.hpp"
#include "sgcov/uplink.hpp"

#include <doctest.h>

#include <algorithm>
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

double db(double x)
{
    return std::pow(10.0, x / 10.0);
}

// Laplace factor at link distance r straight from the model, in physical
// units: interferers at distance x with intensity lambda (1 - e^{-pi lambda x^2}),
// link distance R ~ truncated Rayleigh on [0, x], power p R^{alpha eps}.
double nu_oracle(double r, double tau, const UplinkParams& u, int nx, int nr)
{
    const double s = tau * std::pow(r, u.alpha * (1 - u.epsilon)) / u.p;
    const double scale = 1.0 / std::sqrt(kPi * u.lambda);
    auto inner = [&](double x) {
        // E over the truncated link distance of 1 - 1/(1 + s P x^-alpha) = 1/(1 + x^alpha / (s P)).
        auto g = [&](double rr) {
            const double pdf = 2 * kPi * u.lambda * rr * std::exp(-kPi * u.lambda * rr * rr);
            const double power = u.p * std::pow(rr, u.alpha * u.epsilon);
            return pdf / (1.0 + std::pow(x, u.alpha) / (s * power));
        };
        // The truncation mass cancels against the intensity factor.
        return simpson(g, 0.0, std::min(x, 9.0 * scale), nr);
    };
    // x = scale * e^t
    const double t0 = std::log(1e-4), t1 = std::log(1e5);
    const double integral = simpson(
                                [&](double t) {
                                    const double x = scale * std::exp(t);
                                    return 2 * kPi * u.lambda * x * inner(x) * x;
                                },
                                t0, t1, nx);
    return std::exp(-integral);
}

}  // namespace

TEST_CASE("full channel inversion without noise gives exp(-rho)")
{
    for (double alpha : {3.0, 4.0}) {
        for (double t = -10; t <= 20; t += 1) {
            UplinkParams u{1.0, 1.0, alpha, 1.0, 0.0};
            const double expected = std::exp(-rho(db(t), alpha));
            CAPTURE(t);
            CHECK(std::abs(uplink_coverage(db(t), u) - expected) < 1e-6);
            CHECK(uplink_coverage_full_inversion(db(t), alpha) == doctest::Approx(expected).epsilon(1e-14));
        }
    }
    CHECK(uplink_coverage_full_inversion(1.0, 4.0) == doctest::Approx(std::exp(-kPi / 4)));
}

TEST_CASE("uplink decays faster than downlink")
{
    for (double alpha : {2.5, 3.0, 4.0, 5.0}) {
        for (double t = -20; t <= 30; t += 2.5) {
            const double r = rho(db(t), alpha);
            CHECK(std::exp(-r) < 1.0 / (1.0 + r));
        }
    }
}

TEST_CASE("interferer intensity and truncated link-distance law")
{
    CHECK(interferer_intensity(0.0, 2.0) == 0.0);
    CHECK(interferer_intensity(1e3, 2.0) == doctest::Approx(2.0));
    CHECK(interferer_intensity(0.5, 1.0) == doctest::Approx(1 - std::exp(-kPi * 0.25)));
    for (double d : {0.1, 0.7, 3.0}) {
        const double mass = simpson([&](double r) { return conditional_link_distance_pdf(r, d, 1.3); }, 0.0, d, 2000);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS(conditional_link_distance_pdf(2.0, 1.0, 1.0));
    CHECK_THROWS(conditional_link_distance_pdf(0.5, 0.0, 1.0));
    CHECK_THROWS(interferer_intensity(-1.0, 1.0));
}

TEST_CASE("Laplace transform basics")
{
    UplinkParams u{2.0, 1.0, 4.0, 0.5, 0.0};
    CHECK(uplink_laplace(0.0, u) == 1.0);
    double prev = 1.0;
    for (double s : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double l = uplink_laplace(s, u);
        CHECK(l > 0.0);
        CHECK(l < prev);
        prev = l;
    }
    CHECK_THROWS(uplink_laplace(-1.0, u));
}

TEST_CASE("nu is r-independent under full inversion")
{
    UplinkParams u{1.0, 1.0, 4.0, 1.0, 0.0};
    const double a = uplink_nu(0.1, 2.0, u);
    CHECK(uplink_nu(3.0, 2.0, u) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("nu against a direct physical-units oracle")
{
    for (double eps : {0.0, 0.5, 1.0}) {
        UplinkParams u{0.4, 2.0, 3.5, eps, 0.0};
        for (double r : {0.3, 1.2}) {
            CAPTURE(eps);
            CAPTURE(r);
            const double oracle = nu_oracle(r, 1.5, u, 1200, 400);
            CHECK(uplink_nu(r, 1.5, u) == doctest::Approx(oracle).epsilon(2e-6));
        }
    }
}

TEST_CASE("coverage against the oracle at epsilon = 0.5 with noise")
{
    UplinkParams u{0.5, 1.0, 4.0, 0.5, 0.2};
    const double tau = 1.0;
    // 2 pi lambda int r e^{-pi lambda r^2} e^{-tau sigma2 r^{alpha(1-eps)} / p} nu(r) dr, nu from the library.
    auto f = [&](double r) {
        if (r == 0.0) return 0.0;
        const double noise = std::exp(-tau * u.sigma2 * std::pow(r, u.alpha * (1 - u.epsilon)) / u.p);
        return 2 * kPi * u.lambda * r * std::exp(-kPi * u.lambda * r * r) * noise * uplink_nu(r, tau, u);
    };
    const double outer = simpson(f, 0.0, 4.0, 400);
    CHECK(uplink_coverage(tau, u) == doctest::Approx(outer).epsilon(1e-6));
}

TEST_CASE("noise-free uplink coverage does not depend on density or power")
{
    for (double eps : {0.0, 0.5}) {
        const double a = uplink_coverage(2.0, {1.0, 1.0, 4.0, eps, 0.0});
        CHECK(uplink_coverage(2.0, {4e-6, 3.0, 4.0, eps, 0.0}) == doctest::Approx(a).epsilon(1e-5));
    }
}

TEST_CASE("uplink coverage is a probability and falls in tau")
{
    for (double eps : {0.0, 0.5, 1.0}) {
        for (double sigma2 : {0.0, 0.5}) {
            UplinkParams u{1.0, 1.0, 4.0, eps, sigma2};
            double prev = 1.0;
            for (double t = -10; t <= 20; t += 5) {
                const double c = uplink_coverage(db(t), u);
                CHECK(c >= 0.0);
                CHECK(c <= prev + 1e-9);
                prev = c;
            }
        }
    }
    CHECK_THROWS(uplink_coverage(1.0, {1.0, 1.0, 4.0, 1.5, 0.0}));
    CHECK_THROWS(uplink_coverage(0.0, {}));
}
