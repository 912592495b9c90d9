#ifndef DOTRECON_UTIL_HPP
#define DOTRECON_UTIL_HPP

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace dotrecon {

// Counter-based 64-bit generator (splitmix64 finalizer on seed + counter).
// Streams are reproducible across platforms and independent of draw order,
// which keeps simulated measurement files byte-stable for a given seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t word(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]; never exactly 0 so it is safe inside log().
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(word(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one value per counter.
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

// FNV-1a over a byte stream; used for mesh/layout reference hashes.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n);
  void add_u64(std::uint64_t v);
  void add_double(double v);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;
};

// Static block partition over [0, n); each index is processed by exactly one
// thread, so writes to disjoint per-index outputs are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

unsigned hardware_threads();

}  // namespace dotrecon

#endif
