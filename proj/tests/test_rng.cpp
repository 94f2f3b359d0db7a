#include "sgcov/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace sgcov;

TEST_CASE("same seed gives the same stream")
{
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a() == b());
}

TEST_CASE("splitmix64 reference values")
{
    // First outputs for state 0, from the reference implementation.
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(s) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix64(s) == 0x06c45d188009454fULL);
}

TEST_CASE("substreams differ across indices and are reproducible")
{
    std::set<std::uint64_t> first;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Rng r = substream(7, i);
        first.insert(r());
    }
    CHECK(first.size() == 1000);
    Rng x = substream(7, 3), y = substream(7, 3), z = substream(8, 3);
    const auto vx = x();
    CHECK(vx == y());
    CHECK(vx != z());
}

TEST_CASE("uniform variates stay in range")
{
    Rng r(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = r.uniform_pos();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("moments of the variates")
{
    Rng r(2024);
    const int n = 200000;
    double su = 0, se = 0, se2 = 0, sn = 0, sn2 = 0, sp = 0;
    for (int i = 0; i < n; ++i) {
        su += r.uniform();
        const double e = r.exponential();
        se += e;
        se2 += e * e;
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
        sp += static_cast<double>(r.poisson(3.5));
    }
    // 4-sigma bands on the sample means.
    CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(se / n - 1.0) < 4 * std::sqrt(1.0 / n));
    CHECK(std::abs(se2 / n - 2.0) < 4 * std::sqrt(20.0 / n));
    CHECK(std::abs(sn / n) < 4 * std::sqrt(1.0 / n));
    CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
    CHECK(std::abs(sp / n - 3.5) < 4 * std::sqrt(3.5 / n));
}

TEST_CASE("poisson with zero mean")
{
    Rng r(5);
    CHECK(r.poisson(0.0) == 0);
}
