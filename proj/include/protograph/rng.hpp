#pragma once

#include <cstdint>
#include <vector>

namespace protograph {

// Counter-based random stream: the state is exactly (seed, counter), so a
// stream can be copied, replayed, or forked without touching hidden engine
// state. Every draw consumes a fixed number of counter steps, which keeps
// runs byte-reproducible across platforms (libstdc++ distributions are not).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  // Next raw 64-bit value; advances the counter by one.
  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform();

  // Uniform double in (0, 1), both endpoints excluded.
  double uniform_open();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller; consumes exactly two counter steps.
  double normal();

  // Standard Gumbel: -log(-log(U)).
  double gumbel();

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream; distinct ids give decorrelated streams.
  RngStream fork(std::uint64_t child_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace protograph
