#ifndef CKPZ_RNG_HPP
#define CKPZ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "ckpz/types.hpp"

namespace ckpz {

// Seeded, replica-indexed random stream. Identical (seed, stream_id, call
// sequence) reproduces identical draws bit-for-bit; replicas own disjoint
// streams so results do not depend on how replicas are scheduled.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    // splitmix64 over (seed, stream) to decorrelate consecutive stream ids
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
    auto next = [&x]() {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    };
    std::seed_seq seq{static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next() >> 32),
                      static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next() >> 32),
                      static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next() >> 32)};
    eng_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream_id() const { return stream_id_; }

  // uniform in (0,1]
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  // standard normal via Box-Muller; the spare keeps the draw count even
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
  std::uint32_t stream_id_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ckpz

#endif  // CKPZ_RNG_HPP
