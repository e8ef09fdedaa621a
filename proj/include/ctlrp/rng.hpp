#ifndef CTLRP_RNG_HPP
#define CTLRP_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace ctlrp {

// mt19937_64 with portable draw helpers. std::uniform_*_distribution is
// implementation-defined, so seeded runs would not reproduce across
// standard libraries; these helpers keep output byte-stable everywhere.
using Rng = std::mt19937_64;

inline double uniform_real(Rng &rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

// Inclusive range, rejection sampled to stay unbiased.
inline std::int64_t uniform_int(Rng &rng, std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
}

template <typename T>
void shuffle(Rng &rng, std::vector<T> &values) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace ctlrp

#endif
