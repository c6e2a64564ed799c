#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rcrc {

// Seed streams keep generation and masking draws independent for the same
// example key.
enum class SeedStream : std::uint64_t {
    generate = 1,
    mask = 2,
};

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

std::uint64_t splitmix64(std::uint64_t x);

// Per-example seed:
//   s = splitmix64(run_seed)
//   s = splitmix64(s ^ fnv1a64(key))
//   s = splitmix64(s ^ index)
//   s = splitmix64(s ^ stream)
// `key` is the pair id (or "dialogue_id#turn_id"), `index` the repeat pass.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view key,
                          std::uint64_t index, SeedStream stream);

// Portable random source. std::mt19937_64's output sequence is fixed by the
// standard; the std distributions are not, so the bounded draws here are
// implemented directly on top of the engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    // Uniform double in [0, 1) with 53 bits of resolution.
    double uniform01();

private:
    std::mt19937_64 engine_;
};

}  // namespace rcrc
