#pragma once

// Deterministic random streams. Box-Muller is spelled out so draws do not
// depend on the standard library's distribution internals.

#include <cmath>
#include <cstdint>
#include <random>

#include "swivel/types.hpp"

namespace swivel {

class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double real() {
        if (haveSpare_) {
            haveSpare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        haveSpare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Complex complexGaussian() { return {real(), real()}; }

    // (0, 1]: avoids log(0) in Box-Muller.
    double uniform01() { return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool haveSpare_ = false;
};

}  // namespace swivel
