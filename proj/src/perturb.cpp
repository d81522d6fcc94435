#include "nerve/perturb.hpp"

#include <cmath>
#include <random>

namespace nerve {

namespace {

enum class Stream : std::uint32_t { OccupancyDrop = 1, OccupancyAdd = 2, Orientation = 3, Points = 4 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x4e455256u};
    return std::mt19937_64(seq);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void PerturbSpec::validate() const {
    if (!(point_sigma >= 0.0) || !std::isfinite(point_sigma)) throw std::invalid_argument("sigma must be >= 0");
    if (!is_probability(occ_fp) || !is_probability(occ_fn) || !is_probability(orient_flip))
        throw std::invalid_argument("perturbation probabilities must lie in [0, 1]");
}

NerveGrid perturb(const NerveGrid& grid, const PerturbSpec& spec, const CubeMask& surface_mask) {
    spec.validate();
    if (surface_mask.resolution() != grid.resolution()) throw std::invalid_argument("perturb: resolution mismatch");

    NerveGrid out = grid;
    auto drop_rng = make_stream(spec.seed, Stream::OccupancyDrop);
    auto add_rng = make_stream(spec.seed, Stream::OccupancyAdd);
    auto face_rng = make_stream(spec.seed, Stream::Orientation);
    auto point_rng = make_stream(spec.seed, Stream::Points);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::size_t l = 0; l < grid.cube_count(); ++l) {
        const CubeIndex c = grid.cube_index(l);
        const double u_drop = uniform(drop_rng);
        const double u_add = uniform(add_rng);
        if (grid.occupied(l) && u_drop < spec.occ_fn) {
            out.set_occupied(c, false);
            out.set_point(c, grid.extent(c).center());
        } else if (!grid.occupied(l) && surface_mask[l] && u_add < spec.occ_fp) {
            out.set_occupied(c, true);
        }
    }

    for (std::size_t l = 0; l < grid.cube_count(); ++l) {
        const CubeIndex c = grid.cube_index(l);
        for (int axis = 0; axis < 3; ++axis) {
            if (c[axis] == 0) continue;
            if (uniform(face_rng) < spec.orient_flip) out.set_orientation(c, axis, !out.orientation(c, axis));
        }
    }

    for (std::size_t l = 0; l < grid.cube_count(); ++l) {
        const CubeIndex c = grid.cube_index(l);
        const Vec3 noise(gauss(point_rng), gauss(point_rng), gauss(point_rng));
        if (!out.occupied(l) || spec.point_sigma == 0.0) continue;
        out.set_point(c, grid.extent(c).clamp(out.point(l) + spec.point_sigma * noise));
    }

    out.repair();
    return out;
}

}  // namespace nerve
