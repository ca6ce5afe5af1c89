#pragma once

#include <cstdint>
#include <random>

namespace gpmrpp {

/// Deterministic random source with derivable sub-streams.
///
/// A single user-facing seed is expanded into independent streams, one per
/// purpose (tree shape, robot placement, GP operators, ...), so adding a
/// consumer never perturbs the draws seen by existing ones.  Bounded draws
/// are implemented locally instead of via std::uniform_int_distribution so
/// that sequences are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Raw 64 random bits.
    std::uint64_t next_u64();

    /// Uniform integer in [lo, hi], both ends inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Uniform double in [0, 1).
    double uniform01();

    /// Derive an independent stream.  The same (seed, tag) pair always
    /// yields the same stream, no matter how much the parent has drawn.
    Rng split(std::uint64_t tag) const;

    std::uint64_t stream_seed() const { return stream_seed_; }

private:
    std::uint64_t stream_seed_;
    std::mt19937_64 engine_;
};

/// Stream tags used by the library itself.  Callers are free to add more.
namespace rng_tag {
inline constexpr std::uint64_t kTreeShape = 1;
inline constexpr std::uint64_t kRobotPlacement = 2;
inline constexpr std::uint64_t kEvolution = 3;
inline constexpr std::uint64_t kTrialBase = 100;    // + trial index
inline constexpr std::uint64_t kTestInstances = 4;
inline constexpr std::uint64_t kRunSeed = 5;
}  // namespace rng_tag

}  // namespace gpmrpp
