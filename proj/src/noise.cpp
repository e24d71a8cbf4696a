#include "rqj/noise.hpp"

#include <cmath>

namespace rqj {

namespace {
uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

NoiseSource::NoiseSource(uint64_t seed, uint64_t stream_index)
    : seed_(seed),
      stream_(stream_index),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_index + 0x51ed2701a9e5a3c5ULL))) {}

double NoiseSource::uniform() {
    return double(engine_() >> 11) * 0x1.0p-53;
}

double NoiseSource::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

double NoiseSource::wiener_increment(double dt) { return std::sqrt(dt) * gaussian(); }

}  // namespace rqj
