// Shared error types and a pinned RNG used across the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace slmlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LayoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FramingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// mt19937_64 plus hand-rolled transforms, so every stream of draws is pinned
// by the standard-mandated engine output rather than libstdc++ distribution
// internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::int64_t next_below(std::int64_t n) {
        return static_cast<std::int64_t>(next_double() * static_cast<double>(n));
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t next_range(std::int64_t lo, std::int64_t hi) {
        return lo + next_below(hi - lo + 1);
    }

    bool next_bool() { return (engine_() >> 63) != 0; }

    // Standard normal via Box-Muller; one value per call, cached pair.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace slmlab
