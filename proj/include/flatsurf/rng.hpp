#ifndef FLATSURF_RNG_HPP
#define FLATSURF_RNG_HPP

#include <cstdint>
#include <random>

namespace flatsurf {

// Seeded generator with platform-independent uniform draws.  mt19937_64 has a
// fully specified output sequence; the double conversion below avoids the
// implementation-defined std:: distributions so runs are byte-reproducible.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0,1)
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return n ? gen_() % n : 0; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace flatsurf

#endif
