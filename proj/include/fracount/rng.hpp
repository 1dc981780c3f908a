#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>

namespace fracount {

struct RngSpec {
    std::uint64_t seed = 42;
    /// "mt19937_64" or "splitmix64".
    std::string algorithm = "mt19937_64";

    /// Spec for batch `index`: same algorithm, seed mixed with the index so
    /// batches are independent and reproducible regardless of scheduling.
    RngSpec child(std::uint64_t index) const;
};

/// Seeded 64-bit generator; usable as a UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(const RngSpec& spec);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform();

    const RngSpec& spec() const noexcept { return spec_; }

private:
    RngSpec spec_;
    bool splitmix_;
    std::mt19937_64 mt_;
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace fracount
