#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace longtail {

// Deterministic random stream. Every draw is a fixed, documented transform of
// the raw mt19937_64 output, so two builds given the same seed produce the
// same sequence of doubles, indices and deviates. std::uniform_*_distribution
// and std::shuffle are implementation-defined and must not be used where
// reproducibility matters.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1): top 53 bits of the raw draw scaled by 2^-53.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) via rejection sampling on the raw 64-bit draw.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_below: n must be positive");
        const std::uint64_t rem = (UINT64_MAX % n + 1) % n; // 2^64 mod n
        std::uint64_t r = gen_();
        if (rem != 0) {
            while (r > UINT64_MAX - rem) r = gen_();
        }
        return r % n;
    }

    // Standard normal deviate via the Box-Muller transform:
    //   u1 in (0,1], u2 in [0,1)
    //   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2)
    // z1 is cached and returned by the next call.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Fisher-Yates, iterating from the back, index drawn with next_below.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace longtail
