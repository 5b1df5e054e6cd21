#ifndef MWCUT_RNG_HPP
#define MWCUT_RNG_HPP

#include <cstdint>
#include <random>

namespace mwcut {

/// Seeded generator with hand-rolled uniform mappings so that identical
/// seeds give identical streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace mwcut

#endif  // MWCUT_RNG_HPP
