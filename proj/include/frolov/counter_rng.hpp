#pragma once

#include <array>
#include <cstdint>

namespace frolov {

/// Philox4x32-10 block cipher used as a counter-based generator.
///
/// A stream is identified by (seed, stream id, replicate index); the n-th
/// block of a stream is a pure function of those values and n, so any
/// replicate can be regenerated without replaying the ones before it.
class CounterRng {
  public:
    using Block = std::array<std::uint32_t, 4>;

    CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t replicate) noexcept;

    /// Raw 128-bit block at the given position of this stream.
    [[nodiscard]] Block block(std::uint32_t position) const noexcept;

    /// Next uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() noexcept;

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
    std::uint64_t replicate_;
    std::uint32_t position_ = 0;
    Block buffer_{};
    int buffered_ = 0;  // unread 32-bit words left in buffer_
};

namespace stream_id {
inline constexpr std::uint32_t draw = 0;
inline constexpr std::uint32_t monte_carlo = 1;
inline constexpr std::uint32_t property_c = 2;
}  // namespace stream_id

}  // namespace frolov
