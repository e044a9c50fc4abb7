#pragma once

#include <cstdint>
#include <random>

namespace tssrp {

using Engine = std::mt19937_64;

/// Every random consumer draws from its own engine. Seeds are derived from a
/// single master seed so any one component can be replayed in isolation:
///
///   master ── replication i ──┬── InitialLayout   (first q-subset)
///                             ├── TieBreak        (top-q ties)
///                             ├── PriorDraw       (randomisation values)
///                             ├── Data            (observations)
///                             └── ChangedSet      (random affected streams)
enum class Purpose : std::uint64_t {
    Replication = 0x5eed'0001,
    InitialLayout = 0x5eed'0002,
    TieBreak = 0x5eed'0003,
    PriorDraw = 0x5eed'0004,
    Data = 0x5eed'0005,
    ChangedSet = 0x5eed'0006,
    Validation = 0x5eed'0007,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, Purpose purpose) {
    return derive_seed(parent, static_cast<std::uint64_t>(purpose));
}

/// Seed of replication `index` under `master`.
constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
    return derive_seed(derive_seed(master, Purpose::Replication), index);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace tssrp
