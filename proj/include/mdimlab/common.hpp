#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mdimlab {

// Default absolute tolerance for float comparisons throughout the library.
inline constexpr double kDefaultTol = 1e-9;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleGrid : InvalidParams {
  using InvalidParams::InvalidParams;
};

struct InfeasiblePacking : std::logic_error {
  using std::logic_error::logic_error;
};

struct ScheduleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OrbitEscaped : std::runtime_error {
  int step;
  explicit OrbitEscaped(int s)
      : std::runtime_error("orbit escaped the domain at step " + std::to_string(s)), step(s) {}
};

struct EvaluationEscaped : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic 64-bit generator (splitmix64). Used instead of <random>
// engines/distributions so that sampled values are bit-identical across
// platforms and standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased and
  // deterministic.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw InvalidParams("next_below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Derives an independent stream; used to give parallel workers their own
  // generators without sharing state.
  Rng fork(std::uint64_t salt) {
    Rng r(state_ ^ (0x632be59bd9b4e019ULL * (salt + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

// Runs fn(begin, end) over [0, total) split into contiguous chunks, one per
// worker. Chunk boundaries depend only on (total, threads), so any
// per-chunk results can be combined in a fixed order independent of timing.
template <typename Fn>
void parallel_chunks(std::size_t total, unsigned threads, Fn&& fn) {
  if (threads <= 1 || total < 2) {
    fn(std::size_t{0}, total);
    return;
  }
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(threads, total));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b = std::min(total, w * chunk);
    const std::size_t e = std::min(total, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mdimlab
