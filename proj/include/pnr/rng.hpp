#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pnr {

// splitmix64 finalizer; used to derive well-separated seeds.
std::uint64_t mix64(std::uint64_t x);

// One reproducible random stream. Sampling primitives are written out
// explicitly (no std::*_distribution) so results are identical across
// standard library implementations.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    // Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Number of survivors out of n independent trials with survival
    // probability p. n is small here (at most n_max - 1 photons).
    int binomial(int n, double p) {
        int survivors = 0;
        for (int k = 0; k < n; ++k)
            survivors += bernoulli(p) ? 1 : 0;
        return survivors;
    }

    // Geometric attempt count >= 1 with success probability p per attempt.
    int geometric(double p, int cap = 1 << 20) {
        int attempts = 1;
        while (!bernoulli(p) && attempts < cap)
            ++attempts;
        return attempts;
    }

    // Inverse-CDF draw from a discrete distribution given its cumulative sums.
    int categorical(const std::vector<double>& cumulative) {
        const double u = uniform();
        for (std::size_t k = 0; k < cumulative.size(); ++k)
            if (u < cumulative[k])
                return static_cast<int>(k);
        return static_cast<int>(cumulative.size()) - 1;
    }

  private:
    std::mt19937_64 gen_;
};

// Independent stream for one shot, derived from the master seed. Streams
// depend only on (seed, shot index), never on scheduling, so ensembles are
// reproducible for any worker count.
inline RngStream shot_stream(std::uint64_t master_seed, std::uint64_t shot_index) {
    return RngStream(mix64(master_seed + 0x9E3779B97F4A7C15ull * (shot_index + 1)));
}

}  // namespace pnr
