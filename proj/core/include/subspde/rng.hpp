#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace subspde {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Stream
// (key, path) yields the blocks philox(key, {i_lo, i_hi, path_lo, path_hi})
// for i = 0, 1, ... so every path owns an independent, seekable sequence.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (idx_ == kBuffered) refill();
    return buf_[idx_++];
  }
  // Skip n outputs.
  void discard(std::uint64_t n);

  static counter_type block(counter_type ctr, key_type key) {
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * c2;
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return {c0, c1, c2, c3};
  }

 private:
  static constexpr unsigned kBuffered = 4;

  void refill() {
    buf_ = block(ctr_, key_);
    if (++ctr_[0] == 0) ++ctr_[1];
    idx_ = 0;
  }
  key_type key_;
  counter_type ctr_;
  counter_type buf_{};
  unsigned idx_ = kBuffered;
};

// Standard normal draws from a Philox stream. Uses the ziggurat from
// Boost.Random underneath.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);
  ~NormalStream();
  NormalStream(NormalStream&&) noexcept;
  NormalStream& operator=(NormalStream&&) noexcept;

  double operator()();
  void fill(double* out, std::size_t n, double scale);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace subspde
