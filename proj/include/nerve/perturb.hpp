#pragma once

#include "nerve/grid.hpp"

#include <cstdint>

namespace nerve {

/// Seeded corruption emulating prediction error on a ground-truth grid.
struct PerturbSpec {
    double point_sigma = 0.0;  ///< isotropic Gaussian jitter of cube points
    double occ_fp = 0.0;       ///< P(unoccupied surface cube becomes occupied)
    double occ_fn = 0.0;       ///< P(occupied cube is dropped)
    double orient_flip = 0.0;  ///< P(an inner face flag is toggled)
    std::uint64_t seed = 0;

    void validate() const;
};

/// Applies occupancy flips, orientation flips and point jitter, then repairs
/// the grid invariants. Each attribute class draws from its own random
/// stream, one draw per cube (or face) regardless of state, so changing one
/// probability never shifts another's draws. Jittered points are clamped to
/// their cube; dropped cubes get their point reset to the cube center.
/// Throws std::invalid_argument on a resolution mismatch or invalid spec.
NerveGrid perturb(const NerveGrid& grid, const PerturbSpec& spec, const CubeMask& surface_mask);

}  // namespace nerve
