#ifndef IGFL_RNG_HPP
#define IGFL_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace igfl {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t seed_combine(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t p : parts) s = mix64(s ^ p);
    return s;
}

inline std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> parts) {
    return std::mt19937_64(seed_combine(parts));
}

// Stream tags keep the derived seeds of unrelated random streams apart.
namespace stream {
constexpr std::uint64_t kSampling  = 0x5a3c1;
constexpr std::uint64_t kBatches   = 0xba7c4;
constexpr std::uint64_t kInit      = 0x1417;
constexpr std::uint64_t kTrainData = 0xd474;
constexpr std::uint64_t kTestData  = 0x7e57;
constexpr std::uint64_t kPartition = 0xbeef;
}  // namespace stream

}  // namespace igfl

#endif
