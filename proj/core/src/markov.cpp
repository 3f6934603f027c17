#include "tandemfluid/markov.hpp"

#include <cmath>

namespace tandemfluid {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    for (auto& word : s_) {
        word = splitmix64(seed);
    }
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream) {
    Rng rng(seed);
    for (std::uint64_t k = 0; k < stream; ++k) {
        rng.jump();
    }
    return rng;
}

Rng::result_type Rng::operator()() {
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

void Rng::jump() {
    static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
                                              0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
        for (int b = 0; b < 64; ++b) {
            if (word & (std::uint64_t{1} << b)) {
                for (int k = 0; k < 4; ++k) acc[k] ^= s_[k];
            }
            (*this)();
        }
    }
    s_ = acc;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

TransitionMatrix TransitionMatrix::from_rates(double lambda, double mu) {
    TransitionMatrix t;
    t.m = {{{-lambda, lambda}, {mu, -mu}}};
    return t;
}

SteadyState steady_state(double lambda, double mu) {
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw ModelError("steady_state requires positive switching rates");
    }
    const double total = lambda + mu;
    return {mu / total, lambda / total};
}

double sample_holding_time(Mode i, const SystemParams& p, Rng& rng) {
    return rng.exponential(p.switch_rate(i));
}

}  // namespace tandemfluid
