#pragma once

#include <array>

#include "mvsc/frame.hpp"

namespace mvsc {

/// Band-offset SAO: four signed offsets for the 8-wide sample bands
/// starting at start_band.
struct SaoParams {
    int start_band = 0;                // [0, 28]
    std::array<int, 4> offsets{};      // each in [-7, 7]
    bool operator==(const SaoParams&) const = default;
};

struct FilterFlags {
    bool deblock = true;
    bool sao = true;
};

// In-place deblocking of the region [x0, x1) x [y0, y1) (8-aligned bounds).
// Internal 8x8 edges only, vertical edges first; an edge is filtered when
// |p0 - q0| < beta(qp), beta(qp) = max(0, qp - 16). Region-boundary edges
// (tile or frame) are never touched.
void deblock_tile(Plane& recon, int x0, int y0, int x1, int y1, int qp);

// Per band: offset = clamp(round(mean(orig - recon)), -7, 7); picks the
// start_band with the smallest resulting SSD (ties toward the smallest
// start_band); falls back to all-zero offsets when no candidate beats them.
SaoParams sao_estimate(const Plane& orig, const Plane& recon, int x0, int y0, int x1, int y1);

void sao_apply(Plane& p, const SaoParams& params, int x0, int y0, int x1, int y1);

// deblock, then SAO estimate + apply, inside the region; returns the SAO
// parameters for signaling (zeros when SAO is off).
SaoParams filter_tile(const Plane& orig, Plane& recon, int x0, int y0, int x1, int y1,
                      int qp, FilterFlags flags);

int deblock_beta(int qp);

}  // namespace mvsc
