#include "protograph/rng.hpp"

#include <cmath>

#include "protograph/errors.hpp"

namespace protograph {

namespace {

// splitmix64 finalizer; full-period mixing of a 64-bit input.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  std::uint64_t v = mix64(seed_ ^ mix64(counter_));
  ++counter_;
  return v;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  // Shift into (0,1): never returns an exact endpoint.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_below: n must be positive");
  // Rejection sampling to avoid modulo bias.
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

double RngStream::normal() {
  double u1 = uniform_open();
  double u2 = uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double RngStream::gumbel() { return -std::log(-std::log(uniform_open())); }

RngStream RngStream::fork(std::uint64_t child_id) const {
  return RngStream(mix64(seed_ ^ mix64(0x5851f42d4c957f2dULL + child_id)));
}

}  // namespace protograph
