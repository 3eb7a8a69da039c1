#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace lowrank {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the
// 64-bit stream id occupies the upper half of the 128-bit counter, so
// (seed, stream) pairs give independent, reproducible sequences. Normal
// variates use the Box-Muller transform on pairs of 53-bit uniforms.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  static constexpr std::string_view algorithm_id = "philox4x32-10";

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Block bijection(Block counter, Key key);

 private:
  void refill();

  Key key_;
  Block counter_;
  Block buffer_{};
  int position_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace lowrank
