#pragma once

#include <cstdint>
#include <optional>

#include "mvsc/frame.hpp"
#include "mvsc/packing.hpp"

namespace mvsc {

/// Displacement in quarter-pel luma units. Full-pel IBC restricts both
/// components to multiples of 4.
struct MotionVector {
    int dx = 0;
    int dy = 0;
    bool operator==(const MotionVector&) const = default;
    int l1() const { return (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy); }
};

enum class PredMode : uint8_t { IntraDc = 0, IntraH = 1, IntraV = 2, Ibc = 3, Inter = 4 };

struct SearchParams {
    int range_h = 64;  // full-pel
    int range_v = 64;
    int start_x = 0;  // full-pel target position the window is centered on
    int start_y = 0;
    bool fractional_refine = false;
};

enum class RefAreaMode { RasterCausal, TileReference };

/// Legal IBC reference area for the coding unit at (cu_x, cu_y).
///
/// RasterCausal: CTUs strictly before the current one in raster order over
/// the region. TileReference: that, restricted to the current tile, plus the
/// whole reconstructed-and-filtered tile 0 extended by `ext` replicated
/// samples on each side (ext = 0 without border extension).
struct ReferenceArea {
    RefAreaMode mode = RefAreaMode::RasterCausal;
    int region_x0 = 0;  // raster region bounds (whole frame, or current tile)
    int region_x1 = 0;
    int frame_h = 0;
    int cu_x = 0;
    int cu_y = 0;
    bool has_tile0 = false;
    int tile0_w = 0;
    int ext = 0;

    static constexpr int kCtu = 16;

    // Rectangle fully inside the causal part of the raster region.
    bool causal_contains(int x, int y, int w, int h) const;
    // Rectangle inside the (extended) tile-0 reference surface.
    bool tile0_contains(int x, int y, int w, int h) const;
    bool contains(int x, int y, int w, int h) const {
        return causal_contains(x, y, w, h) || tile0_contains(x, y, w, h);
    }
    // No 16x16 target anywhere (first CTU of its region, no tile-0 surface).
    bool empty() const;
};

ReferenceArea reference_area(RefAreaMode mode, const PackedLayout& layout, int current_tile,
                             int cu_x, int cu_y, bool border_extension);

// Replicated search/support margin around the reference tile:
// search range 64 + filter half-support 4, rounded up to a multiple of 8.
constexpr int kTile0Pad = 72;
constexpr int kInterPad = 32;  // previous-frame margin: range 24 + support 4, rounded up
constexpr int kInterRange = 24;

/// Reconstruction surfaces an IBC/inter vector may sample from. Plane
/// pointers for tile 0 / previous frame are border-extended copies whose
/// (pad, pad) sample maps to packed-frame coordinate (0, 0) of the tile /
/// frame respectively.
struct RefSurfaces {
    const Plane* cur_y = nullptr;  // packed-frame reconstruction in progress
    const Plane* cur_u = nullptr;
    const Plane* cur_v = nullptr;
    const Plane* t0_y = nullptr;  // extended tile-0 reference, or null
    const Plane* t0_u = nullptr;
    const Plane* t0_v = nullptr;
    int t0_pad = 0;
    const Plane* prev_y = nullptr;  // extended previous decoded frame, or null
    const Plane* prev_u = nullptr;
    const Plane* prev_v = nullptr;
    int prev_pad = 0;
};

// 8-tap luma interpolation. (x0, y0) is the block position in `ref`
// coordinates; integer phases copy, fractional phases run the separable
// filters (horizontal first). Throws std::out_of_range when the filter
// support leaves the plane.
void interpolate_luma(const Plane& ref, MotionVector mv, int x0, int y0, int w, int h,
                      uint8_t* dst, ptrdiff_t dst_stride);

// Bilinear chroma interpolation at eighth-pel phase; mv is the luma vector,
// (x0, y0) the block position in chroma coordinates.
void interpolate_chroma(const Plane& ref, MotionVector mv, int x0, int y0, int w, int h,
                        uint8_t* dst, ptrdiff_t dst_stride);

const int16_t* luma_taps(int phase);  // phase 0..3

void intra_predict(PredMode mode, const uint8_t* top, const uint8_t* left, int size,
                   uint8_t* dst, ptrdiff_t dst_stride);

Plane extend_borders(const Plane& tile_recon, int pad);

/// Where a legal IBC vector samples from: the causal part of the current
/// reconstruction, or the extended tile-0 surface. Offsets translate packed
/// coordinates into the surface plane.
struct ResolvedRef {
    const Plane* luma = nullptr;
    const Plane* cb = nullptr;
    const Plane* cr = nullptr;
    int off_luma = 0;  // plane coord = packed coord + off
    int off_chroma = 0;
};

// Checks full legality of `mv` for a w x h luma block at (cu_x, cu_y),
// including interpolation support and the derived chroma access, and
// reports the surface to sample. Returns false for illegal vectors.
bool resolve_ibc_ref(const ReferenceArea& area, const RefSurfaces& surf, MotionVector mv,
                     int cu_x, int cu_y, int w, int h, ResolvedRef* out);

// Signaling cost of a vector against its predictor; IBC deltas are coded in
// full-pel units when the stream disables quarter-pel vectors.
int mv_delta_bits(MotionVector mv, MotionVector pred, bool full_pel_units);

struct SearchResult {
    bool available = false;
    MotionVector mv;
    uint64_t ssd = 0;
    double cost = 0.0;
};

// Full-pel raster scan of the window [start +- range] intersected with the
// legal area, cost = SSD + lambda * vector bits (exp-golomb length of the
// delta against mv_pred); ties break toward smaller |dx|+|dy|, then first in
// raster order. With params.fractional_refine the 8 half-pel then 8
// quarter-pel neighbours of the winner are evaluated (strict improvement
// only). full_pel_units selects whether IBC deltas are signaled in full-pel
// units (see BlockSyntax).
SearchResult ibc_search(const uint8_t* orig, ptrdiff_t orig_stride, int w, int h,
                        int cu_x, int cu_y, const ReferenceArea& area, const RefSurfaces& surf,
                        const SearchParams& params, MotionVector mv_pred, double lambda,
                        bool full_pel_units);

// Same cost model against the extended previous frame; start is the zero
// displacement, range +-24, always quarter-pel refined.
SearchResult mcp_search(const uint8_t* orig, ptrdiff_t orig_stride, int w, int h,
                        int cu_x, int cu_y, const RefSurfaces& surf,
                        MotionVector mv_pred, double lambda);

}  // namespace mvsc
