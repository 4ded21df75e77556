#include "loewner/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

namespace loewner {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform(counter));
}

}  // namespace loewner
