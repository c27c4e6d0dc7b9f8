#pragma once

#include <cstdint>
#include <string_view>

namespace dcosim {

uint64_t splitmix64(uint64_t& state);

// 64-bit FNV-1a, used for stream derivation and config hashing.
uint64_t fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ull);

// Deterministic random stream addressed by (seed, replica, purpose).
//
// Every piece of experiment randomness draws from one of these, with purposes
// {"data", "oracle", "compressor"}, so that two algorithm variants can be fed
// byte-identical draws (the exact-equivalence tests depend on this). The core
// is xoshiro256++; doubles are built from the top 53 bits, so streams are
// reproducible across platforms.
class RngStream {
public:
    RngStream(uint64_t seed, uint64_t replica, std::string_view purpose);

    uint64_t next_u64();
    double uniform();             // [0, 1)
    double normal();              // standard normal (Box-Muller)
    int uniform_int(int n);       // {0, ..., n-1}, n >= 1
    bool bernoulli(double prob);  // uniform() < prob

private:
    uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace dcosim
