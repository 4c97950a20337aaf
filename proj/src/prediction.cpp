#include "mvsc/prediction.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "mvsc/bitstream.hpp"
#include "mvsc/kernels.hpp"

namespace mvsc {

namespace {

constexpr int16_t kLumaTaps[4][8] = {
    {0, 0, 0, 64, 0, 0, 0, 0},
    {-1, 4, -10, 58, 17, -5, 1, 0},
    {-1, 4, -11, 40, 40, -11, 4, -1},
    {0, 1, -5, 17, 58, -10, 4, -1},
};

struct Box {
    int x0, y0, x1, y1;  // half-open
};

// Luma filter support for a w x h block addressed by mv from (x, y).
Box luma_support(MotionVector mv, int x, int y, int w, int h) {
    int fx = mv.dx & 3, fy = mv.dy & 3;
    int ix = x + (mv.dx >> 2), iy = y + (mv.dy >> 2);
    return {ix - (fx ? 3 : 0), iy - (fy ? 3 : 0), ix + w + (fx ? 4 : 0), iy + h + (fy ? 4 : 0)};
}

// Chroma (4:2:0) bilinear support for the same block; eighth-pel phase.
Box chroma_support(MotionVector mv, int x, int y, int w, int h) {
    int fx = mv.dx & 7, fy = mv.dy & 7;
    int ix = x / 2 + (mv.dx >> 3), iy = y / 2 + (mv.dy >> 3);
    return {ix, iy, ix + w / 2 + (fx ? 1 : 0), iy + h / 2 + (fy ? 1 : 0)};
}

bool box_in(const Box& b, int x0, int y0, int x1, int y1) {
    return b.x0 >= x0 && b.y0 >= y0 && b.x1 <= x1 && b.y1 <= y1;
}

}  // namespace

const int16_t* luma_taps(int phase) { return kLumaTaps[phase]; }

bool ReferenceArea::causal_contains(int x, int y, int w, int h) const {
    if (x < region_x0 || x + w > region_x1 || y < 0 || y + h > frame_h) return false;
    if (y + h <= cu_y) return true;
    return y + h <= cu_y + kCtu && x + w <= cu_x;
}

bool ReferenceArea::tile0_contains(int x, int y, int w, int h) const {
    if (!has_tile0) return false;
    return x >= -ext && y >= -ext && x + w <= tile0_w + ext && y + h <= frame_h + ext;
}

bool ReferenceArea::empty() const {
    return !has_tile0 && cu_y == 0 && cu_x == region_x0;
}

ReferenceArea reference_area(RefAreaMode mode, const PackedLayout& layout, int current_tile,
                             int cu_x, int cu_y, bool border_extension) {
    ReferenceArea a;
    a.mode = mode;
    a.frame_h = layout.frame_height;
    a.cu_x = cu_x;
    a.cu_y = cu_y;
    if (mode == RefAreaMode::RasterCausal) {
        a.region_x0 = 0;
        a.region_x1 = layout.frame_width();
    } else {
        a.region_x0 = layout.tile_x0(current_tile);
        a.region_x1 = layout.tile_x0(current_tile + 1);
        a.has_tile0 = current_tile > 0;
        a.tile0_w = layout.tile_width;
        a.ext = border_extension ? kTile0Pad : 0;
    }
    return a;
}

void interpolate_luma(const Plane& ref, MotionVector mv, int x0, int y0, int w, int h,
                      uint8_t* dst, ptrdiff_t dst_stride) {
    const int fx = mv.dx & 3, fy = mv.dy & 3;
    const int ix = x0 + (mv.dx >> 2), iy = y0 + (mv.dy >> 2);
    Box s = luma_support(mv, x0, y0, w, h);
    if (!box_in(s, 0, 0, ref.width, ref.height))
        throw std::out_of_range("interpolate_luma: support outside reference");

    const auto& k = kernels::active();
    const ptrdiff_t stride = ref.width;
    if (fx == 0 && fy == 0) {
        for (int y = 0; y < h; ++y)
            std::memcpy(dst + y * dst_stride, ref.row(iy + y) + ix, size_t(w));
    } else if (fy == 0) {
        k.filter_h_u8(ref.row(iy) + ix - 3, stride, dst, dst_stride, w, h, kLumaTaps[fx]);
    } else if (fx == 0) {
        k.filter_v_u8(ref.row(iy - 3) + ix, stride, dst, dst_stride, w, h, kLumaTaps[fy]);
    } else {
        int16_t stack_tmp[23 * 16];
        std::vector<int16_t> heap_tmp;
        int16_t* tmp = stack_tmp;
        if (w > 16 || h > 16) {
            heap_tmp.resize(size_t(w) * (h + 7));
            tmp = heap_tmp.data();
        }
        k.filter_h_i16(ref.row(iy - 3) + ix - 3, stride, tmp, w, w, h + 7, kLumaTaps[fx]);
        k.filter_v_i16_u8(tmp, w, dst, dst_stride, w, h, kLumaTaps[fy]);
    }
}

void interpolate_chroma(const Plane& ref, MotionVector mv, int x0, int y0, int w, int h,
                        uint8_t* dst, ptrdiff_t dst_stride) {
    const int fx = mv.dx & 7, fy = mv.dy & 7;
    const int ix = x0 + (mv.dx >> 3), iy = y0 + (mv.dy >> 3);
    Box s{ix, iy, ix + w + (fx ? 1 : 0), iy + h + (fy ? 1 : 0)};
    if (!box_in(s, 0, 0, ref.width, ref.height))
        throw std::out_of_range("interpolate_chroma: support outside reference");

    if (fx == 0 && fy == 0) {
        for (int y = 0; y < h; ++y)
            std::memcpy(dst + y * dst_stride, ref.row(iy + y) + ix, size_t(w));
        return;
    }
    const int x1 = fx ? 1 : 0, y1 = fy ? 1 : 0;
    for (int y = 0; y < h; ++y) {
        const uint8_t* r0 = ref.row(iy + y);
        const uint8_t* r1 = ref.row(iy + y + y1);
        uint8_t* d = dst + y * dst_stride;
        for (int x = 0; x < w; ++x) {
            int a = r0[ix + x], b = r0[ix + x + x1];
            int c = r1[ix + x], e = r1[ix + x + x1];
            int v = (8 - fx) * (8 - fy) * a + fx * (8 - fy) * b + (8 - fx) * fy * c + fx * fy * e;
            d[x] = uint8_t((v + 32) >> 6);
        }
    }
}

void intra_predict(PredMode mode, const uint8_t* top, const uint8_t* left, int size,
                   uint8_t* dst, ptrdiff_t dst_stride) {
    switch (mode) {
        case PredMode::IntraDc: {
            int sum = 0, count = 0;
            for (int i = 0; top && i < size; ++i) sum += top[i];
            for (int i = 0; left && i < size; ++i) sum += left[i];
            count = (top ? size : 0) + (left ? size : 0);
            uint8_t dc = count ? uint8_t((sum + count / 2) / count) : 128;
            for (int y = 0; y < size; ++y)
                std::memset(dst + y * dst_stride, dc, size_t(size));
            break;
        }
        case PredMode::IntraH:
            for (int y = 0; y < size; ++y)
                std::memset(dst + y * dst_stride, left ? left[y] : 128, size_t(size));
            break;
        case PredMode::IntraV:
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x)
                    dst[y * dst_stride + x] = top ? top[x] : 128;
            break;
        default:
            throw std::invalid_argument("intra_predict: not an intra mode");
    }
}

Plane extend_borders(const Plane& tile_recon, int pad) {
    if (pad < 0) throw std::invalid_argument("extend_borders: negative pad");
    Plane out(tile_recon.width + 2 * pad, tile_recon.height + 2 * pad);
    for (int y = 0; y < out.height; ++y) {
        const uint8_t* src = tile_recon.row(std::clamp(y - pad, 0, tile_recon.height - 1));
        uint8_t* dst = out.row(y);
        for (int x = 0; x < out.width; ++x)
            dst[x] = src[std::clamp(x - pad, 0, tile_recon.width - 1)];
    }
    return out;
}

bool resolve_ibc_ref(const ReferenceArea& area, const RefSurfaces& surf, MotionVector mv,
                     int cu_x, int cu_y, int w, int h, ResolvedRef* out) {
    Box ls = luma_support(mv, cu_x, cu_y, w, h);
    Box cs = chroma_support(mv, cu_x, cu_y, w, h);

    // Causal part of the current reconstruction (same staircase at half
    // resolution for chroma, CTU band 8).
    auto causal_chroma = [&](const Box& b) {
        int rx0 = area.region_x0 / 2, rx1 = area.region_x1 / 2;
        int ccu_x = area.cu_x / 2, ccu_y = area.cu_y / 2;
        if (b.x0 < rx0 || b.x1 > rx1 || b.y0 < 0 || b.y1 > area.frame_h / 2) return false;
        if (b.y1 <= ccu_y) return true;
        return b.y1 <= ccu_y + ReferenceArea::kCtu / 2 && b.x1 <= ccu_x;
    };
    if (area.causal_contains(ls.x0, ls.y0, ls.x1 - ls.x0, ls.y1 - ls.y0) && causal_chroma(cs)) {
        *out = {surf.cur_y, surf.cur_u, surf.cur_v, 0, 0};
        return true;
    }

    if (area.has_tile0 && surf.t0_y) {
        int e = area.ext, ec = area.ext / 2;
        bool luma_ok = box_in(ls, -e, -e, area.tile0_w + e, area.frame_h + e);
        bool chroma_ok = box_in(cs, -ec, -ec, area.tile0_w / 2 + ec, area.frame_h / 2 + ec);
        if (luma_ok && chroma_ok) {
            *out = {surf.t0_y, surf.t0_u, surf.t0_v, surf.t0_pad, surf.t0_pad / 2};
            return true;
        }
    }
    return false;
}

int mv_delta_bits(MotionVector mv, MotionVector pred, bool full_pel_units) {
    int ddx = mv.dx - pred.dx, ddy = mv.dy - pred.dy;
    if (full_pel_units) {
        ddx /= 4;
        ddy /= 4;
    }
    return se_length(ddx) + se_length(ddy);
}

namespace {

struct Candidate {
    MotionVector mv;
    uint64_t ssd;
    double cost;
    int l1;
};

// strict improvement, ties toward smaller |dx|+|dy|, then first found
bool better(const Candidate& c, const Candidate& best) {
    if (c.cost != best.cost) return c.cost < best.cost;
    return c.l1 < best.l1;
}

}  // namespace

SearchResult ibc_search(const uint8_t* orig, ptrdiff_t orig_stride, int w, int h,
                        int cu_x, int cu_y, const ReferenceArea& area, const RefSurfaces& surf,
                        const SearchParams& params, MotionVector mv_pred, double lambda,
                        bool full_pel_units) {
    const auto& k = kernels::active();
    Candidate best{};
    bool found = false;

    for (int ty = params.start_y - params.range_v; ty <= params.start_y + params.range_v; ++ty) {
        for (int tx = params.start_x - params.range_h; tx <= params.start_x + params.range_h; ++tx) {
            MotionVector mv{4 * (tx - cu_x), 4 * (ty - cu_y)};
            ResolvedRef rr;
            if (!resolve_ibc_ref(area, surf, mv, cu_x, cu_y, w, h, &rr)) continue;
            const Plane* p = rr.luma;
            uint64_t ssd = k.ssd_u8(orig, orig_stride,
                                    p->row(ty + rr.off_luma) + tx + rr.off_luma, p->width, w, h);
            double cost = double(ssd) + lambda * mv_delta_bits(mv, mv_pred, full_pel_units);
            Candidate c{mv, ssd, cost, mv.l1()};
            if (!found || better(c, best)) {
                best = c;
                found = true;
            }
        }
    }
    if (!found) return {};

    if (params.fractional_refine) {
        uint8_t pred[16 * 16];
        auto try_frac = [&](MotionVector mv) {
            ResolvedRef rr;
            if (!resolve_ibc_ref(area, surf, mv, cu_x, cu_y, w, h, &rr)) return;
            interpolate_luma(*rr.luma, mv, cu_x + rr.off_luma, cu_y + rr.off_luma, w, h, pred, w);
            uint64_t ssd = k.ssd_u8(orig, orig_stride, pred, w, w, h);
            double cost = double(ssd) + lambda * mv_delta_bits(mv, mv_pred, false);
            if (cost < best.cost) best = Candidate{mv, ssd, cost, mv.l1()};
        };
        for (int step : {2, 1}) {
            MotionVector base = best.mv;
            for (int oy = -step; oy <= step; oy += step)
                for (int ox = -step; ox <= step; ox += step) {
                    if (ox == 0 && oy == 0) continue;
                    try_frac({base.dx + ox, base.dy + oy});
                }
        }
    }
    return {true, best.mv, best.ssd, best.cost};
}

SearchResult mcp_search(const uint8_t* orig, ptrdiff_t orig_stride, int w, int h,
                        int cu_x, int cu_y, const RefSurfaces& surf,
                        MotionVector mv_pred, double lambda) {
    const auto& k = kernels::active();
    const Plane* ref = surf.prev_y;
    const int pad = surf.prev_pad;
    const int fw = ref->width - 2 * pad, fh = ref->height - 2 * pad;

    auto legal = [&](MotionVector mv) {
        Box ls = luma_support(mv, cu_x, cu_y, w, h);
        Box cs = chroma_support(mv, cu_x, cu_y, w, h);
        return box_in(ls, -pad, -pad, fw + pad, fh + pad) &&
               box_in(cs, -pad / 2, -pad / 2, fw / 2 + pad / 2, fh / 2 + pad / 2);
    };

    Candidate best{};
    bool found = false;
    for (int ty = cu_y - kInterRange; ty <= cu_y + kInterRange; ++ty) {
        for (int tx = cu_x - kInterRange; tx <= cu_x + kInterRange; ++tx) {
            MotionVector mv{4 * (tx - cu_x), 4 * (ty - cu_y)};
            if (!legal(mv)) continue;
            uint64_t ssd = k.ssd_u8(orig, orig_stride, ref->row(ty + pad) + tx + pad,
                                    ref->width, w, h);
            double cost = double(ssd) + lambda * mv_delta_bits(mv, mv_pred, false);
            Candidate c{mv, ssd, cost, mv.l1()};
            if (!found || better(c, best)) {
                best = c;
                found = true;
            }
        }
    }
    if (!found) return {};

    uint8_t pred[16 * 16];
    auto try_frac = [&](MotionVector mv) {
        if (!legal(mv)) return;
        interpolate_luma(*ref, mv, cu_x + pad, cu_y + pad, w, h, pred, w);
        uint64_t ssd = k.ssd_u8(orig, orig_stride, pred, w, w, h);
        double cost = double(ssd) + lambda * mv_delta_bits(mv, mv_pred, false);
        if (cost < best.cost) best = Candidate{mv, ssd, cost, mv.l1()};
    };
    for (int step : {2, 1}) {
        MotionVector base = best.mv;
        for (int oy = -step; oy <= step; oy += step)
            for (int ox = -step; ox <= step; ox += step) {
                if (ox == 0 && oy == 0) continue;
                try_frac({base.dx + ox, base.dy + oy});
            }
    }
    return {true, best.mv, best.ssd, best.cost};
}

}  // namespace mvsc
