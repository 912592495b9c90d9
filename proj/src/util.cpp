#include "dotrecon/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace dotrecon {

double CounterRng::normal(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void Fnv1a::add_bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001B3ull;
  }
}

void Fnv1a::add_u64(std::uint64_t v) { add_bytes(&v, sizeof v); }

void Fnv1a::add_double(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  add_u64(bits);
}

unsigned hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return std::clamp(n, 1u, 8u);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned nt = std::min<std::size_t>(hardware_threads(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dotrecon
