#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fracsync {

/// Key of a reproducible random stream. Identical (seed, stream) always
/// reproduces the identical draw sequence.
struct RngSeed {
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
};

/// Counter-based generator: the state is an affine counter and every output
/// is a finalizer hash of it, so streams keyed by (seed, stream) can be
/// created independently on any thread without sequence coupling.
class CounterRng {
public:
    explicit CounterRng(RngSeed key) noexcept {
        counter_ = mix(key.seed ^ 0x9E3779B97F4A7C15ULL);
        counter_ ^= mix(key.stream + 0xD1B54A32D192ED03ULL);
    }

    std::uint64_t next_u64() noexcept {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix(counter_);
    }

    /// Uniform draw in (0, 1].
    double uniform01() noexcept {
        return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fracsync
