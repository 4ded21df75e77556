#pragma once

#include <cstdint>

namespace loewner {

// Counter-based stream: every draw is a pure function of (seed, stream, counter).
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::uint64_t bits(std::uint64_t counter) const;
    double uniform(std::uint64_t counter) const;  // open interval (0,1)
    double normal(std::uint64_t counter) const;   // inverse-CDF transform
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace loewner
