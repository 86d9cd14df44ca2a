#pragma once

#include <cstdint>

namespace ics {

/// Counter-based random stream. The n-th draw is a pure function of
/// (seed, stream, n), so independent streams can be consumed in any order or
/// on any thread and still reproduce bit-identical values.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1].
  double uniform() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a list of integers into one stream id (e.g. replicate, pair, purpose).
std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) noexcept;

}  // namespace ics
