#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scoutrl {

using Vec2 = Eigen::Vector2d;

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

// Uniform discretization of the rectangular service area.
struct GridSpec {
    double length_x = 0.0;  // meters
    double length_y = 0.0;
    double resolution = 0.0;  // cell edge, meters
    int cells_x = 0;
    int cells_y = 0;

    GridSpec() = default;
    GridSpec(double lx, double ly, double res);

    int cell_count() const { return cells_x * cells_y; }

    bool contains(Cell c) const {
        return c.x >= 0 && c.x < cells_x && c.y >= 0 && c.y < cells_y;
    }

    // Row-major flat index, rows indexed by y.
    int index(Cell c) const { return c.y * cells_x + c.x; }
    Cell cell_at(int idx) const { return Cell{idx % cells_x, idx / cells_x}; }

    Vec2 cell_center(Cell c) const;

    // Cell containing a world position (positions on the far boundary fall
    // into the last cell).
    Cell cell_of(const Vec2& p) const;

    // Clamp a world position to the service rectangle.
    Vec2 clip(const Vec2& p) const {
        return Vec2(std::clamp(p.x(), 0.0, length_x), std::clamp(p.y(), 0.0, length_y));
    }
};

// Cells whose centers lie within Euclidean `radius` of `position`,
// intersected with the grid.
std::vector<int> footprint(const Vec2& position, double radius, const GridSpec& grid);

// Rectangular block of cells assigned to one agent.
struct OperationalRegion {
    int agent_id = 0;
    int x0 = 0, x1 = 0;  // inclusive column range
    int y0 = 0, y1 = 0;  // inclusive row range

    int cell_count() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
    bool contains(Cell c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }

    // World-coordinate bounds and centroid.
    Vec2 world_min(const GridSpec& g) const { return Vec2(x0 * g.resolution, y0 * g.resolution); }
    Vec2 world_max(const GridSpec& g) const {
        return Vec2((x1 + 1) * g.resolution, (y1 + 1) * g.resolution);
    }
    Vec2 centroid(const GridSpec& g) const { return 0.5 * (world_min(g) + world_max(g)); }
};

enum class RegionLayout { Disjoint, PartialOverlap, HighOverlap };

RegionLayout region_layout_from_string(const std::string& s);
std::string to_string(RegionLayout layout);

// Equal vertical strips with the layout's shared-column fraction
// (0 / 25% / 75% of the strip width shared between neighbors).
std::vector<OperationalRegion> make_regions(const GridSpec& grid, int num_agents,
                                            RegionLayout layout);

// Per-cell membership mask of the union of regions (the operational grid).
std::vector<uint8_t> operational_mask(const GridSpec& grid,
                                      const std::vector<OperationalRegion>& regions);

}  // namespace scoutrl
