#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace subiso {

using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds.
Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key);

// Counter-based stream: key = seed, counter = (stream, block). Streams with
// distinct (seed, stream) pairs are independent and need no shared state.
class Rng {
public:
    using result_type = std::uint32_t;

    Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u32(); }

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // [0, 1) with 53 random bits.
    double uniform();
    // Uniform on {0, ..., n-1}.
    std::uint64_t uniform_int(std::uint64_t n);
    double sign() { return (next_u32() & 1u) ? 1.0 : -1.0; }
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_, stream_, block_ = 0;
    Philox4x32Ctr buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0;
};

// Seed for run `index` of an experiment rooted at `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace subiso
