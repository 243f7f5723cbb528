#include "scoutrl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace scoutrl {

GridSpec::GridSpec(double lx, double ly, double res)
    : length_x(lx), length_y(ly), resolution(res) {
    if (res <= 0.0) throw std::invalid_argument("GridSpec: resolution must be > 0");
    cells_x = static_cast<int>(std::floor(lx / res));
    cells_y = static_cast<int>(std::floor(ly / res));
    if (cells_x < 1 || cells_y < 1)
        throw std::invalid_argument("GridSpec: area smaller than one cell");
}

Vec2 GridSpec::cell_center(Cell c) const {
    if (!contains(c)) throw std::out_of_range("GridSpec::cell_center: cell out of range");
    return Vec2((c.x + 0.5) * resolution, (c.y + 0.5) * resolution);
}

Cell GridSpec::cell_of(const Vec2& p) const {
    int ix = std::min(static_cast<int>(std::floor(p.x() / resolution)), cells_x - 1);
    int iy = std::min(static_cast<int>(std::floor(p.y() / resolution)), cells_y - 1);
    return Cell{std::max(ix, 0), std::max(iy, 0)};
}

std::vector<int> footprint(const Vec2& position, double radius, const GridSpec& grid) {
    if (radius < 0.0) throw std::invalid_argument("footprint: radius must be >= 0");
    std::vector<int> cells;
    // Candidate window: centers live at (i + 0.5) * res.
    const double res = grid.resolution;
    int x_lo = std::max(0, static_cast<int>(std::floor((position.x() - radius) / res - 0.5)));
    int x_hi = std::min(grid.cells_x - 1,
                        static_cast<int>(std::ceil((position.x() + radius) / res - 0.5)));
    int y_lo = std::max(0, static_cast<int>(std::floor((position.y() - radius) / res - 0.5)));
    int y_hi = std::min(grid.cells_y - 1,
                        static_cast<int>(std::ceil((position.y() + radius) / res - 0.5)));
    const double r2 = radius * radius;
    for (int iy = y_lo; iy <= y_hi; ++iy) {
        for (int ix = x_lo; ix <= x_hi; ++ix) {
            Cell c{ix, iy};
            if ((grid.cell_center(c) - position).squaredNorm() <= r2)
                cells.push_back(grid.index(c));
        }
    }
    return cells;
}

RegionLayout region_layout_from_string(const std::string& s) {
    if (s == "disjoint") return RegionLayout::Disjoint;
    if (s == "partial") return RegionLayout::PartialOverlap;
    if (s == "high") return RegionLayout::HighOverlap;
    throw std::invalid_argument("unknown region layout: " + s);
}

std::string to_string(RegionLayout layout) {
    switch (layout) {
        case RegionLayout::Disjoint: return "disjoint";
        case RegionLayout::PartialOverlap: return "partial";
        case RegionLayout::HighOverlap: return "high";
    }
    return "disjoint";
}

std::vector<OperationalRegion> make_regions(const GridSpec& grid, int num_agents,
                                            RegionLayout layout) {
    if (num_agents < 1) throw std::invalid_argument("make_regions: need at least one agent");
    double frac = 0.0;
    switch (layout) {
        case RegionLayout::Disjoint: frac = 0.0; break;
        case RegionLayout::PartialOverlap: frac = 0.25; break;
        case RegionLayout::HighOverlap: frac = 0.75; break;
    }
    const int gx = grid.cells_x;
    std::vector<OperationalRegion> regions;
    if (num_agents == 1) {
        regions.push_back({0, 0, gx - 1, 0, grid.cells_y - 1});
        return regions;
    }
    // Strip width w with neighbor overlap frac*w: N*w - (N-1)*frac*w = gx.
    const double w = gx / (num_agents - frac * (num_agents - 1));
    const double stride = w * (1.0 - frac);
    for (int i = 0; i < num_agents; ++i) {
        int x0 = static_cast<int>(std::lround(i * stride));
        int x1 = static_cast<int>(std::lround(i * stride + w)) - 1;
        if (i == 0) x0 = 0;
        if (i == num_agents - 1) x1 = gx - 1;
        x0 = std::clamp(x0, 0, gx - 1);
        x1 = std::clamp(x1, x0, gx - 1);
        regions.push_back({i, x0, x1, 0, grid.cells_y - 1});
    }
    return regions;
}

std::vector<uint8_t> operational_mask(const GridSpec& grid,
                                      const std::vector<OperationalRegion>& regions) {
    std::vector<uint8_t> mask(grid.cell_count(), 0);
    for (const auto& r : regions) {
        for (int iy = r.y0; iy <= r.y1; ++iy)
            for (int ix = r.x0; ix <= r.x1; ++ix) mask[grid.index({ix, iy})] = 1;
    }
    return mask;
}

}  // namespace scoutrl
