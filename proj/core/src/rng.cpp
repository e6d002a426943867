#include "subspde/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <utility>

namespace subspde {

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

void Philox4x32::discard(std::uint64_t n) {
  while (n > 0 && idx_ < kBuffered) {
    ++idx_;
    --n;
  }
  if (n == 0) return;
  const std::uint64_t blocks = n / 4;
  std::uint64_t c = (static_cast<std::uint64_t>(ctr_[1]) << 32 | ctr_[0]) + blocks;
  ctr_[0] = static_cast<std::uint32_t>(c);
  ctr_[1] = static_cast<std::uint32_t>(c >> 32);
  idx_ = kBuffered;
  for (std::uint64_t r = n % 4; r > 0; --r) (*this)();
}

namespace {

// Two consecutive 32-bit outputs joined into one 64-bit word, so that the
// ziggurat gets its bucket index and mantissa from a single call.
class Philox64View {
 public:
  using result_type = std::uint64_t;
  Philox64View(std::uint64_t seed, std::uint64_t stream) : eng_(seed, stream) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    const std::uint64_t hi = eng_();
    return hi << 32 | eng_();
  }

 private:
  Philox4x32 eng_;
};

}  // namespace

struct NormalStream::Impl {
  Philox64View eng;
  boost::random::normal_distribution<double> dist;
  Impl(std::uint64_t seed, std::uint64_t stream) : eng(seed, stream) {}
};

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream) : impl_(new Impl(seed, stream)) {}
NormalStream::~NormalStream() { delete impl_; }
NormalStream::NormalStream(NormalStream&& o) noexcept : impl_(std::exchange(o.impl_, nullptr)) {}
NormalStream& NormalStream::operator=(NormalStream&& o) noexcept {
  std::swap(impl_, o.impl_);
  return *this;
}

double NormalStream::operator()() { return impl_->dist(impl_->eng); }

void NormalStream::fill(double* out, std::size_t n, double scale) {
  auto& d = impl_->dist;
  auto& e = impl_->eng;
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * d(e);
}

}  // namespace subspde
