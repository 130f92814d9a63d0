#pragma once

// Seeded Monte Carlo primitives: deterministic substreams, running
// statistics, and the (value, stderr, samples, seed) record that every
// stochastic estimate in this library carries.

#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <stdexcept>
#include <vector>

namespace renact::mc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed for an independent substream. Every chunk, series term, or inner
/// estimator gets its own stream so that results do not depend on scheduling.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x51ed270b89f3c1a5ull));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform integer in [0, n), unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

struct MCEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static MCEstimate exact(double v, std::uint64_t seed = 0) {
    return {v, 0.0, 0, seed};
  }

  MCEstimate scaled(double c) const {
    return {c * value, std::abs(c) * stderr_, samples, seed};
  }

  /// Sum of independent estimates; errors add in quadrature.
  MCEstimate operator+(const MCEstimate& o) const {
    return {value + o.value, std::hypot(stderr_, o.stderr_),
            samples + o.samples, seed};
  }
};

class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  // Chan et al. pairwise merge; used for deterministic chunk reduction.
  void merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * nb / (na + nb);
    m2_ += o.m2_ + d * d * na * nb / (na + nb);
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }

  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

  double stderr_of_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

namespace detail {
// Chunk count depends only on the sample budget, never on the worker count,
// so the substream layout (and hence every result) is scheduling-invariant.
inline int chunk_count(std::uint64_t samples) {
  if (samples <= 1u << 14) return 1;
  const std::uint64_t c = samples / (1u << 14);
  return static_cast<int>(std::min<std::uint64_t>(c, 256));
}
}  // namespace detail

/// Mean of body(rng) over `samples` draws, chunked into deterministic
/// substreams of `seed`. `workers <= 1` runs serially; more workers only
/// change wall time.
template <class Body>
MCEstimate sample_mean(std::uint64_t samples, std::uint64_t seed, int workers,
                       Body&& body) {
  if (samples == 0) throw std::invalid_argument("sample_mean: samples == 0");
  const int chunks = detail::chunk_count(samples);
  const std::uint64_t per = samples / chunks;
  const std::uint64_t extra = samples % chunks;

  auto run_chunk = [&](int c) {
    Rng rng(substream_seed(seed, static_cast<std::uint64_t>(c)));
    RunningStat stat;
    const std::uint64_t n = per + (static_cast<std::uint64_t>(c) < extra ? 1 : 0);
    for (std::uint64_t i = 0; i < n; ++i) stat.add(body(rng));
    return stat;
  };

  RunningStat total;
  if (workers <= 1 || chunks == 1) {
    for (int c = 0; c < chunks; ++c) total.merge(run_chunk(c));
  } else {
    std::vector<RunningStat> results(chunks);
    std::vector<std::future<void>> pool;
    std::atomic<int> next{0};
    const int nw = std::min(workers, chunks);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
          results[c] = run_chunk(c);
      }));
    }
    for (auto& f : pool) f.get();
    for (const auto& s : results) total.merge(s);
  }
  return {total.mean(), total.stderr_of_mean(), samples, seed};
}

}  // namespace renact::mc
