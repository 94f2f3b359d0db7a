#include "sgcov/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sgcov {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed)
{
    for (auto& word : s_) word = splitmix64(seed);
}

Rng::result_type Rng::operator()()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

double Rng::exponential() { return -std::log(uniform_pos()); }

double Rng::normal()
{
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
}

Rng substream(std::uint64_t master_seed, std::uint64_t index)
{
    std::uint64_t state = master_seed;
    const std::uint64_t a = splitmix64(state);
    std::uint64_t mixed = a ^ (index * 0xd1b54a32d192ed03ULL);
    return Rng(splitmix64(mixed));
}

}  // namespace sgcov
