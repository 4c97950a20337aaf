#pragma once

#include <vector>

#include "mvsc/frame.hpp"

namespace mvsc {

/// Maps tile index -> camera index (cameras numbered left to right).
/// Tile 0 always holds the designated reference (center) view.
struct ViewOrder {
    std::vector<int> permutation;

    int n_views() const { return int(permutation.size()); }
    bool valid() const;
    /// camera index -> tile index
    std::vector<int> inverse() const;
};

struct PackedLayout {
    int n_tiles = 0;
    int tile_width = 0;    // luma pixels, multiple of 16
    int frame_height = 0;  // luma pixels

    int tile_x0(int k) const { return k * tile_width; }
    int frame_width() const { return n_tiles * tile_width; }
};

// Center first, then alternating outward left, right. Three views give
// [1, 0, 2] (middle-leftmost-rightmost).
ViewOrder view_packing_order(int n_views);

std::pair<Frame, PackedLayout> pack(const std::vector<Frame>& views, const ViewOrder& order);

// Returns views indexed by camera position (left to right).
std::vector<Frame> unpack(const Frame& packed, const PackedLayout& layout, const ViewOrder& order);

}  // namespace mvsc
