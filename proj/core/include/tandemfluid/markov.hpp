#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "tandemfluid/model.hpp"

namespace tandemfluid {

/// xoshiro256** generator seeded through splitmix64.
///
/// Output is bit-reproducible for a given seed on any platform. `jump()`
/// advances the stream by 2^128 draws and is used to carve independent
/// per-replication streams out of one seed.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    /// Stream `stream` of `seed`: the base generator advanced by `stream` jumps.
    static Rng stream(std::uint64_t seed, std::uint64_t stream);

    result_type operator()();
    void jump();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Exponential variate -ln(1 - U) / rate.
    double exponential(double rate);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Generator matrix of the two-state capacity process, rows summing to zero.
struct TransitionMatrix {
    std::array<std::array<double, 2>, 2> m{};

    static TransitionMatrix from_rates(double lambda, double mu);
};

struct SteadyState {
    double p1 = 0.5;
    double p2 = 0.5;

    [[nodiscard]] double operator[](Mode m) const { return m == Mode::High ? p1 : p2; }
};

/// Stationary law (mu, lambda) / (lambda + mu); throws ModelError on non-positive rates.
[[nodiscard]] SteadyState steady_state(double lambda, double mu);

/// Sojourn time in mode `i`: exponential with rate lambda (High) or mu (Low).
[[nodiscard]] double sample_holding_time(Mode i, const SystemParams& p, Rng& rng);

}  // namespace tandemfluid
