#include "gpmrpp/rng.hpp"

namespace gpmrpp {
namespace {

// splitmix64 finalizer; also used to mix (seed, tag) pairs for sub-streams.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : stream_seed_(seed), engine_(mix64(seed)) {}

std::uint64_t Rng::next_u64() {
    return engine_();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;  // hi >= lo
    if (span == 0) {                                            // full 64-bit range
        return static_cast<std::int64_t>(next_u64());
    }
    // Unbiased bounded draw (multiply-shift with rejection).
    const std::uint64_t reject_below = (0 - span) % span;
    for (;;) {
        const std::uint64_t x = next_u64();
        const auto wide = static_cast<unsigned __int128>(x) * span;
        if (static_cast<std::uint64_t>(wide) >= reject_below) {
            return lo + static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 64));
        }
    }
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Rng Rng::split(std::uint64_t tag) const {
    return Rng(mix64(stream_seed_ ^ mix64(tag)));
}

}  // namespace gpmrpp
