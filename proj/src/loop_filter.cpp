#include "mvsc/loop_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvsc {

int deblock_beta(int qp) { return std::max(0, qp - 16); }

void deblock_tile(Plane& recon, int x0, int y0, int x1, int y1, int qp) {
    if (x0 % 8 || y0 % 8 || x1 % 8 || y1 % 8)
        throw std::invalid_argument("deblock_tile: bounds must be 8-aligned");
    const int beta = deblock_beta(qp);
    if (beta == 0) return;

    // Vertical edges (columns x = x0 + 8k strictly inside the region).
    for (int x = x0 + 8; x < x1; x += 8) {
        for (int y = y0; y < y1; ++y) {
            uint8_t* r = recon.row(y);
            int p1 = r[x - 2], p0 = r[x - 1], q0 = r[x], q1 = r[x + 1];
            if (std::abs(p0 - q0) < beta) {
                r[x - 1] = uint8_t((p1 + 2 * p0 + q0 + 2) >> 2);
                r[x] = uint8_t((q1 + 2 * q0 + p0 + 2) >> 2);
            }
        }
    }
    // Horizontal edges.
    for (int y = y0 + 8; y < y1; y += 8) {
        uint8_t* rp1 = recon.row(y - 2);
        uint8_t* rp0 = recon.row(y - 1);
        uint8_t* rq0 = recon.row(y);
        uint8_t* rq1 = recon.row(y + 1);
        for (int x = x0; x < x1; ++x) {
            int p1 = rp1[x], p0 = rp0[x], q0 = rq0[x], q1 = rq1[x];
            if (std::abs(p0 - q0) < beta) {
                rp0[x] = uint8_t((p1 + 2 * p0 + q0 + 2) >> 2);
                rq0[x] = uint8_t((q1 + 2 * q0 + p0 + 2) >> 2);
            }
        }
    }
}

namespace {

inline int band_of(uint8_t s) { return s >> 3; }

inline uint8_t apply_offset(uint8_t s, int offset) {
    return uint8_t(std::clamp(int(s) + offset, 0, 255));
}

}  // namespace

SaoParams sao_estimate(const Plane& orig, const Plane& recon, int x0, int y0, int x1, int y1) {
    // Per-band error stats, then the per-band offset from the mean and its
    // exact SSD change including sample clamping.
    int64_t sum_err[32] = {};
    int64_t count[32] = {};
    for (int y = y0; y < y1; ++y) {
        const uint8_t* o = orig.row(y);
        const uint8_t* r = recon.row(y);
        for (int x = x0; x < x1; ++x) {
            int b = band_of(r[x]);
            sum_err[b] += o[x] - r[x];
            count[b] += 1;
        }
    }
    int offset_of[32] = {};
    for (int b = 0; b < 32; ++b) {
        if (!count[b]) continue;
        double mean = double(sum_err[b]) / double(count[b]);
        offset_of[b] = std::clamp(int(std::llround(mean)), -7, 7);
    }
    int64_t ssd_delta[32] = {};
    for (int y = y0; y < y1; ++y) {
        const uint8_t* o = orig.row(y);
        const uint8_t* r = recon.row(y);
        for (int x = x0; x < x1; ++x) {
            int b = band_of(r[x]);
            if (!offset_of[b]) continue;
            int e0 = o[x] - r[x];
            int e1 = o[x] - apply_offset(r[x], offset_of[b]);
            ssd_delta[b] += int64_t(e1) * e1 - int64_t(e0) * e0;
        }
    }

    int best_start = 0;
    int64_t best_delta = 0;  // all-zero offsets are always a candidate
    bool have = false;
    for (int s = 0; s <= 28; ++s) {
        int64_t d = ssd_delta[s] + ssd_delta[s + 1] + ssd_delta[s + 2] + ssd_delta[s + 3];
        if (!have || d < best_delta) {
            best_delta = d;
            best_start = s;
            have = true;
        }
    }
    SaoParams params;
    if (best_delta < 0) {
        params.start_band = best_start;
        for (int i = 0; i < 4; ++i) params.offsets[i] = offset_of[best_start + i];
    }
    return params;
}

void sao_apply(Plane& p, const SaoParams& params, int x0, int y0, int x1, int y1) {
    for (int y = y0; y < y1; ++y) {
        uint8_t* r = p.row(y);
        for (int x = x0; x < x1; ++x) {
            int b = band_of(r[x]) - params.start_band;
            if (b >= 0 && b < 4) r[x] = apply_offset(r[x], params.offsets[b]);
        }
    }
}

SaoParams filter_tile(const Plane& orig, Plane& recon, int x0, int y0, int x1, int y1,
                      int qp, FilterFlags flags) {
    if (flags.deblock) deblock_tile(recon, x0, y0, x1, y1, qp);
    SaoParams params;
    if (flags.sao) {
        params = sao_estimate(orig, recon, x0, y0, x1, y1);
        sao_apply(recon, params, x0, y0, x1, y1);
    }
    return params;
}

}  // namespace mvsc
