#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace msv {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The stream is a pure function of (seed, counter), so draws are
/// reproducible across platforms and easy to re-derive in other languages.
/// The 64-bit seed is the key; the 128-bit counter starts at zero and is
/// incremented once per block of four 32-bit outputs.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0) { this->seed(seed); }

  void seed(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Advance past `n` outputs without generating them one by one.
  void discard(std::uint64_t n);

  /// Raw bijection: ten rounds of the Philox S-P network.
  static Block encrypt(Block counter, Key key);

 private:
  void increment_counter();

  Key key_{};
  Block counter_{};
  Block buffer_{};
  unsigned position_ = 4;
};

using Rng = Philox4x32;

/// Draws from N(0, 1).
double standard_normal(Rng& rng);

/// Draws from the chi-squared law with `df` (real, > 0) degrees of freedom.
double chi_squared(Rng& rng, double df);

}  // namespace msv
