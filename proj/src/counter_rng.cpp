#include "frolov/counter_rng.hpp"

namespace frolov {
namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;
constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

CounterRng::Block philox_4x32_10(CounterRng::Block ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, ctr[0], lo0, hi0);
        mulhilo(kMulB, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t replicate) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      replicate_(replicate) {}

CounterRng::Block CounterRng::block(std::uint32_t position) const noexcept {
    const Block ctr{position, stream_, static_cast<std::uint32_t>(replicate_),
                    static_cast<std::uint32_t>(replicate_ >> 32)};
    return philox_4x32_10(ctr, key_);
}

std::uint64_t CounterRng::next_u64() noexcept {
    if (buffered_ < 2) {
        buffer_ = block(position_++);
        buffered_ = 4;
    }
    const std::uint64_t hi = buffer_[4 - buffered_];
    const std::uint64_t lo = buffer_[5 - buffered_];
    buffered_ -= 2;
    return (hi << 32) | lo;
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace frolov
