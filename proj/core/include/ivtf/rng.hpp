#pragma once

#include <array>
#include <cstdint>

namespace ivtf {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: output is a pure function of
/// (counter, key).
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
};

/// SplitMix64 output function, used to derive keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Key for stream family `cell` under `seed`.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t cell);

/// Sequential view of one Philox stream. The stream is identified by a
/// 64-bit key and a 64-bit stream index (typically the replication number);
/// draws within it advance the low counter words. Two streams with different
/// (key, stream) never overlap, so work can be split arbitrarily across
/// threads without changing any draw.
class CounterRng
{
  public:
    CounterRng(std::uint64_t key, std::uint64_t stream);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal via Box-Muller; values come in cached pairs.
    double normal();

  private:
    void refill();

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ivtf
