#pragma once

#include <stdexcept>

#include "timdof/rng.hpp"

namespace timdof {

// Bounded-density coefficient family: draws are uniform on [delta1, delta2],
// so f_max = 1/(delta2 - delta1). The normalization f_max >= 1 and
// delta2 >= 1 is part of the model contract. Coefficients are redrawn for
// every channel use: coherence time is one.
struct ChannelModel {
    double delta1 = 1.0;
    double delta2 = 2.0;

    ChannelModel() = default;
    ChannelModel(double d1, double d2) : delta1(d1), delta2(d2) { validate(); }

    void validate() const {
        if (!(delta1 > 0.0) || !(delta2 > delta1))
            throw std::invalid_argument("channel support must satisfy 0 < delta1 < delta2");
        if (!(delta2 >= 1.0))
            throw std::invalid_argument("normalization requires delta2 >= 1");
        if (!(f_max() >= 1.0))
            throw std::invalid_argument("normalization requires f_max >= 1 (delta2 - delta1 <= 1)");
    }

    double f_max() const { return 1.0 / (delta2 - delta1); }

    double draw(SplitMix64& rng) const { return delta1 + (delta2 - delta1) * rng.next_double(); }
};

} // namespace timdof
