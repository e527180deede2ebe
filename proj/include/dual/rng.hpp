#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace dual {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stable seed for a sub-task (stage, repeat, budget, ...) of a base-seeded run.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base ^ splitmix64(salt));
}

// Seeded draws that consume only the raw mt19937_64 stream. Standard-library
// distributions are implementation-defined, so they are avoided here; for a
// fixed seed every sequence below is reproducible across platforms.
class RandomEngine {
public:
    explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // unbiased uniform integer in [0, bound), bound >= 1
    std::uint64_t next_index(std::uint64_t bound) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t excess = (max % bound + 1) % bound;  // 2^64 mod bound
        std::uint64_t x;
        do {
            x = gen_();
        } while (excess != 0 && x > max - excess);
        return x % bound;
    }

    // standard normal, Box-Muller
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dual
