#pragma once

#include <cstdint>
#include <cstddef>
#include <cmath>
#include <stdexcept>
#include <string>
#include <functional>

namespace wavebench {

inline constexpr const char* kToolVersion = "0.1.0";

// Error families map onto CLI exit codes: ConfigError -> 2,
// NumericalError -> 3, IoError -> 4, anything else -> 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstraintViolation : ConfigError {
    using ConfigError::ConfigError;
};
struct NumericalBlowup : NumericalError {
    using NumericalError::NumericalError;
};
struct ProjectionFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct NonFiniteGradient : NumericalError {
    using NumericalError::NumericalError;
};
struct ShapeMismatch : std::logic_error {
    using std::logic_error::logic_error;
};
struct GraphCycle : std::logic_error {
    using std::logic_error::logic_error;
};
struct WindowOutOfRange : std::logic_error {
    using std::logic_error::logic_error;
};

// Deterministic, platform-independent RNG. xoshiro256++ seeded via splitmix64;
// no standard-library distributions so that streams are bit-stable everywhere.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    // Independent substream for (seed, stream) pairs; used for per-episode
    // and per-run seeding so results are invariant to scheduling order.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    // Box-Muller; caches the second variate.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0x1.0p-53) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// FNV-1a over bytes; used for config hashes.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}
inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

// Worker-count resolution: explicit argument > WAVEBENCH_THREADS > hardware.
int resolve_threads(int requested = 0);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
// independent; any reduction over results happens caller-side in index order
// so outputs do not depend on the worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace wavebench
