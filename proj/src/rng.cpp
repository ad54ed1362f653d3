#include "msv/rng.hpp"

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace msv {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

void Philox4x32::seed(std::uint64_t seed) {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  counter_ = {0, 0, 0, 0};
  position_ = 4;
}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void Philox4x32::increment_counter() {
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
}

Philox4x32::result_type Philox4x32::operator()() {
  if (position_ == 4) {
    buffer_ = encrypt(counter_, key_);
    increment_counter();
    position_ = 0;
  }
  return buffer_[position_++];
}

void Philox4x32::discard(std::uint64_t n) {
  while (n > 0 && position_ < 4) {
    ++position_;
    --n;
  }
  const std::uint64_t blocks = n / 4;
  // 128-bit add of `blocks` into the counter.
  std::uint64_t low = (static_cast<std::uint64_t>(counter_[1]) << 32) | counter_[0];
  const std::uint64_t sum = low + blocks;
  const bool carry = sum < low;
  counter_[0] = static_cast<std::uint32_t>(sum);
  counter_[1] = static_cast<std::uint32_t>(sum >> 32);
  if (carry) {
    if (++counter_[2] == 0) ++counter_[3];
  }
  for (std::uint64_t i = 0; i < n % 4; ++i) (*this)();
}

double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

double chi_squared(Rng& rng, double df) {
  boost::random::chi_squared_distribution<double> chi2(df);
  return chi2(rng);
}

}  // namespace msv
