#include "nerve/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace nerve {

namespace {

constexpr char kMagic[6] = {'N', 'E', 'R', 'V', 'E', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
    return v;
}

double get_f64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(v);
}

}  // namespace

void check_resolution(int resolution) {
    if (resolution < kMinResolution || resolution > kMaxResolution) {
        throw std::invalid_argument("grid resolution must be in [" + std::to_string(kMinResolution) + ", " +
                                    std::to_string(kMaxResolution) + "], got " + std::to_string(resolution));
    }
}

int axis_cell(double x, int resolution) {
    int c = static_cast<int>(std::floor((x + 1.0) * resolution / 2.0));
    c = std::clamp(c, 0, resolution - 1);
    // Align with cell_min so the tie-break agrees with cube_extent bit for bit.
    while (c + 1 < resolution && x >= cell_min(c + 1, resolution)) ++c;
    while (c > 0 && x < cell_min(c, resolution)) --c;
    return c;
}

CubeIndex cell_of(const Vec3& p, int resolution) {
    return {axis_cell(p.x(), resolution), axis_cell(p.y(), resolution), axis_cell(p.z(), resolution)};
}

Box cube_extent(const CubeIndex& index, int resolution) {
    for (int a = 0; a < 3; ++a) {
        if (index[a] < 0 || index[a] >= resolution) throw std::out_of_range("cube index out of range");
    }
    Box box;
    for (int a = 0; a < 3; ++a) {
        box.min[a] = cell_min(index[a], resolution);
        box.max[a] = index[a] + 1 == resolution ? 1.0 : cell_min(index[a] + 1, resolution);
    }
    return box;
}

// ---------------------------------------------------------------------------
// CubeMask

CubeMask::CubeMask(int resolution) : resolution_(resolution) {
    check_resolution(resolution);
    flags_.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
}

bool CubeMask::test(const CubeIndex& c) const {
    return flags_.at((static_cast<std::size_t>(c.i) * resolution_ + c.j) * resolution_ + c.k) != 0;
}

void CubeMask::set(const CubeIndex& c, bool value) {
    for (int a = 0; a < 3; ++a) {
        if (c[a] < 0 || c[a] >= resolution_) throw std::out_of_range("mask index out of range");
    }
    flags_[(static_cast<std::size_t>(c.i) * resolution_ + c.j) * resolution_ + c.k] = value ? 1 : 0;
}

std::size_t CubeMask::count() const {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

CubeMask mask_from_points(std::span<const Vec3> points, int resolution) {
    CubeMask mask(resolution);
    for (const auto& p : points) {
        if (!p.allFinite() || (p.array().abs() > 1.0).any()) {
            throw std::invalid_argument("point outside [-1,1]^3");
        }
        mask.set(cell_of(p, resolution));
    }
    return mask;
}

CubeMask dilate(const CubeMask& mask, int radius) {
    const int r = mask.resolution();
    CubeMask out(r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                if (!mask.test({i, j, k})) continue;
                for (int di = -radius; di <= radius; ++di)
                    for (int dj = -radius; dj <= radius; ++dj)
                        for (int dk = -radius; dk <= radius; ++dk) {
                            const CubeIndex n{i + di, j + dj, k + dk};
                            if (n.i < 0 || n.j < 0 || n.k < 0 || n.i >= r || n.j >= r || n.k >= r) continue;
                            out.set(n);
                        }
            }
    return out;
}

// ---------------------------------------------------------------------------
// NerveGrid

NerveGrid::NerveGrid(int resolution) : resolution_(resolution) {
    check_resolution(resolution);
    const auto n = static_cast<std::size_t>(resolution) * resolution * resolution;
    occupancy_.assign(n, 0);
    orientation_.assign(3 * n, 0);
    points_.resize(n);
    for (std::size_t l = 0; l < n; ++l) points_[l] = cube_extent(cube_index(l), resolution).center();
}

bool NerveGrid::in_range(const CubeIndex& c) const {
    return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < resolution_ && c.j < resolution_ && c.k < resolution_;
}

std::size_t NerveGrid::linear_index(const CubeIndex& c) const {
    if (!in_range(c)) throw std::out_of_range("cube index out of range");
    return (static_cast<std::size_t>(c.i) * resolution_ + c.j) * resolution_ + c.k;
}

CubeIndex NerveGrid::cube_index(std::size_t linear) const {
    const auto r = static_cast<std::size_t>(resolution_);
    return {static_cast<int>(linear / (r * r)), static_cast<int>((linear / r) % r), static_cast<int>(linear % r)};
}

void NerveGrid::set_occupied(const CubeIndex& c, bool value) { occupancy_[linear_index(c)] = value ? 1 : 0; }

void NerveGrid::set_orientation(const CubeIndex& c, int axis, bool value) {
    const auto l = linear_index(c);
    if (axis < 0 || axis > 2) throw std::out_of_range("axis must be 0, 1 or 2");
    if (value && c[axis] == 0) throw std::invalid_argument("orientation flag on a grid-boundary face");
    orientation_[3 * l + axis] = value ? 1 : 0;
}

void NerveGrid::set_point(const CubeIndex& c, const Vec3& p) { points_[linear_index(c)] = p; }

std::size_t NerveGrid::occupied_count() const {
    return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), std::uint8_t{1}));
}

std::size_t NerveGrid::true_face_count() const {
    return static_cast<std::size_t>(std::count(orientation_.begin(), orientation_.end(), std::uint8_t{1}));
}

CubeMask NerveGrid::occupancy_mask() const {
    CubeMask mask(resolution_);
    for (std::size_t l = 0; l < occupancy_.size(); ++l) mask.set_linear(l, occupancy_[l] != 0);
    return mask;
}

std::vector<std::string> NerveGrid::violations(std::size_t limit) const {
    std::vector<std::string> out;
    auto report = [&](const CubeIndex& c, const std::string& what) {
        if (out.size() < limit) {
            std::ostringstream s;
            s << "cube (" << c.i << "," << c.j << "," << c.k << "): " << what;
            out.push_back(s.str());
        }
    };
    for (std::size_t l = 0; l < occupancy_.size(); ++l) {
        const auto c = cube_index(l);
        if (occupancy_[l] > 1) report(c, "occupancy byte not 0/1");
        for (int a = 0; a < 3; ++a) {
            const auto flag = orientation_[3 * l + a];
            if (flag > 1) report(c, "orientation byte not 0/1");
            if (flag == 0) continue;
            if (c[a] == 0) {
                report(c, "orientation flag on grid-boundary face");
                continue;
            }
            CubeIndex n = c;
            n[a] -= 1;
            if (occupancy_[l] == 0 || occupancy_[linear_index(n)] == 0) {
                report(c, "orientation flag adjacent to an unoccupied cube");
            }
        }
        const auto& p = points_[l];
        if (!p.allFinite() || !cube_extent(c, resolution_).contains(p)) report(c, "point outside cube extent");
    }
    return out;
}

void NerveGrid::validate() const {
    const auto v = violations(1);
    if (!v.empty()) throw FormatError("invalid grid: " + v.front());
}

void NerveGrid::repair() {
    for (std::size_t l = 0; l < occupancy_.size(); ++l) {
        const auto c = cube_index(l);
        for (int a = 0; a < 3; ++a) {
            if (!orientation_[3 * l + a]) continue;
            CubeIndex n = c;
            n[a] -= 1;
            if (c[a] == 0 || !occupancy_[l] || !occupancy_[linear_index(n)]) orientation_[3 * l + a] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Serialization

std::vector<std::uint8_t> write_grid(const NerveGrid& grid) {
    const std::size_t n = grid.cube_count();
    std::vector<std::uint8_t> out;
    out.reserve(sizeof kMagic + 4 + n + 3 * n + 24 * n);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, static_cast<std::uint32_t>(grid.resolution_));
    out.insert(out.end(), grid.occupancy_.begin(), grid.occupancy_.end());
    out.insert(out.end(), grid.orientation_.begin(), grid.orientation_.end());
    for (const auto& p : grid.points_) {
        put_f64(out, p.x());
        put_f64(out, p.y());
        put_f64(out, p.z());
    }
    return out;
}

NerveGrid read_grid(std::span<const std::uint8_t> bytes) {
    constexpr std::size_t header = sizeof kMagic + 4;
    if (bytes.size() < header) throw FormatError("truncated grid header");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw FormatError("bad magic, expected NERVE1");
    const std::uint32_t r = get_u32(bytes.data() + sizeof kMagic);
    if (r < kMinResolution || r > kMaxResolution) throw FormatError("resolution out of range: " + std::to_string(r));
    const std::size_t n = static_cast<std::size_t>(r) * r * r;
    const std::size_t expected = header + n + 3 * n + 24 * n;
    if (bytes.size() < expected) throw FormatError("truncated grid payload");
    if (bytes.size() > expected) throw FormatError("trailing bytes after grid payload");

    NerveGrid grid(static_cast<int>(r));
    const auto* p = bytes.data() + header;
    std::copy(p, p + n, grid.occupancy_.begin());
    p += n;
    std::copy(p, p + 3 * n, grid.orientation_.begin());
    p += 3 * n;
    for (std::size_t l = 0; l < n; ++l, p += 24) grid.points_[l] = Vec3(get_f64(p), get_f64(p + 8), get_f64(p + 16));
    grid.validate();
    return grid;
}

NerveGrid load_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NerveError("cannot open grid file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return read_grid(bytes);
}

void save_grid(const NerveGrid& grid, const std::string& path) {
    const auto bytes = write_grid(grid);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NerveError("cannot write grid file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw NerveError("failed writing grid file: " + path);
}

nlohmann::json grid_to_json(const NerveGrid& grid) {
    nlohmann::json j;
    j["resolution"] = grid.resolution();
    j["occupancy"] = grid.occupancy_;
    j["orientations"] = grid.orientation_;
    auto pts = nlohmann::json::array();
    for (const auto& p : grid.points_) pts.push_back({p.x(), p.y(), p.z()});
    j["points"] = std::move(pts);
    return j;
}

NerveGrid grid_from_json(const nlohmann::json& j) {
    try {
        const int r = j.at("resolution").get<int>();
        if (r < kMinResolution || r > kMaxResolution) throw FormatError("resolution out of range");
        NerveGrid grid(r);
        const std::size_t n = grid.cube_count();
        auto occ = j.at("occupancy").get<std::vector<std::uint8_t>>();
        auto ori = j.at("orientations").get<std::vector<std::uint8_t>>();
        const auto& pts = j.at("points");
        if (occ.size() != n || ori.size() != 3 * n || pts.size() != n) throw FormatError("grid JSON array size mismatch");
        grid.occupancy_ = std::move(occ);
        grid.orientation_ = std::move(ori);
        for (std::size_t l = 0; l < n; ++l) {
            const auto v = pts[l].get<std::array<double, 3>>();
            grid.points_[l] = Vec3(v[0], v[1], v[2]);
        }
        grid.validate();
        return grid;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("grid JSON: ") + e.what());
    }
}

}  // namespace nerve
