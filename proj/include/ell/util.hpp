#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ell {

// Deterministic PRNG (splitmix64). We avoid std::uniform_int_distribution and
// std::shuffle because their output is implementation-defined; seeded runs
// must produce identical artifacts everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) by rejection.
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound is 0");
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double unit() {  // [0,1)
    return double(next() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = size_t(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Child seed for trial i, fixed splitting rule so concurrent trials are
  // reproducible independent of scheduling.
  static uint64_t split(uint64_t master, uint64_t index) {
    Rng r(master ^ (0xd1342543de82ef95ULL * (index + 1)));
    return r.next();
  }

 private:
  uint64_t state_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace ell
