#pragma once

#include <cstdint>
#include <random>

namespace cfs {

/// Counter-based seed splitter. One global seed fans out to independent
/// streams identified by integer labels, so changing the number of draws in
/// one component never shifts another component's stream.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer on the (seed, stream) pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(split_seed(seed, stream)) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double normal(double mean = 0.0, double sigma = 1.0) {
        return std::normal_distribution<double>(mean, sigma)(gen_);
    }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return std::uniform_int_distribution<int>(lo, hi)(gen_);
    }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

} // namespace cfs
