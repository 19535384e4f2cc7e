#pragma once

#include <cstdint>
#include <random>

#include "tqe/params.hpp"

namespace tqe {

// Deterministic uniform doubles built from raw mt19937_64 words (53-bit
// mantissa), independent of any library distribution implementation, so
// seeded runs are byte-reproducible.
struct UniformSampler {
    std::mt19937_64 rng;
    explicit UniformSampler(unsigned long long seed) : rng(seed) {}

    double next() { return (double)(rng() >> 11) * 0x1.0p-53; }
    double in(double lo, double hi) { return lo + (hi - lo) * next(); }

    Knobs knobs_in_window(const EngineParameters& p) {
        return {in(p.omega_knob_range[0], p.omega_knob_range[1]),
                in(p.drive_knob_range[0], p.drive_knob_range[1])};
    }
};

}  // namespace tqe
