#pragma once

#include <cstdint>
#include <optional>

namespace surrokit {

/// Counter-based generator: draw k of a stream is a pure function of
/// (seed, stream ids, k), so substreams can be generated in any order or on
/// any thread with identical results. The mixing function is SplitMix64's
/// finalizer. Distributions are implemented here rather than taken from
/// <random> because the standard leaves those algorithms unspecified.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b = 0);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Gamma(shape, scale 1), Marsaglia-Tsang.
  double gamma(double shape);
  // Student-t with `df` degrees of freedom; df == +inf gives a standard normal.
  double student_t(double df);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace surrokit
