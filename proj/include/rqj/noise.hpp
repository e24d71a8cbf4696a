#pragma once

#include <cstdint>
#include <random>

namespace rqj {

// Deterministic per-trajectory noise stream. A (seed, stream_index) pair
// reproduces the same sample sequence bit-for-bit: the engine is the
// standard-specified mt19937_64 and the Gaussian transform is hand-rolled
// (library normal_distribution is implementation-defined).
class NoiseSource {
  public:
    NoiseSource(uint64_t seed, uint64_t stream_index);

    uint64_t seed() const { return seed_; }
    uint64_t stream_index() const { return stream_; }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform();
    // Standard normal via Marsaglia's polar method.
    double gaussian();
    // Wiener increment over dt: N(0, dt).
    double wiener_increment(double dt);

  private:
    uint64_t seed_, stream_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rqj
