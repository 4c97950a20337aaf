#include "mvsc/codec.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "codec_internal.hpp"
#include "mvsc/kernels.hpp"

namespace mvsc {

double lambda_for_qp(int qp, double scale) {
    return scale * 0.85 * std::exp2((qp - 12) / 3.0);
}

namespace detail {

const std::array<int, 64>& zigzag8() {
    static const std::array<int, 64> zz = [] {
        std::array<int, 64> z{};
        int idx = 0;
        for (int s = 0; s < 15; ++s) {
            if (s % 2) {
                for (int r = std::max(0, s - 7); r <= std::min(7, s); ++r)
                    z[idx++] = r * 8 + (s - r);
            } else {
                for (int r = std::min(7, s); r >= std::max(0, s - 7); --r)
                    z[idx++] = r * 8 + (s - r);
            }
        }
        return z;
    }();
    return zz;
}

CuSyntax parse_cu(BitReader& br, bool inter_allowed, bool ibc_allowed, bool ibc_full_pel,
                  MotionVector ibc_pred, MotionVector inter_pred) {
    CuSyntax syn;
    uint32_t m = br.ue();
    if (m > 4) throw BitstreamError("invalid prediction mode " + std::to_string(m));
    syn.mode = PredMode(m);
    if (syn.mode == PredMode::Inter && !inter_allowed)
        throw BitstreamError("inter CU in intra frame");
    if (syn.mode == PredMode::Ibc && !ibc_allowed)
        throw BitstreamError("IBC CU in simulcast stream");
    if (mode_has_mv(syn.mode)) {
        int ddx = br.se();
        int ddy = br.se();
        if (syn.mode == PredMode::Ibc && ibc_full_pel) {
            ddx *= 4;
            ddy *= 4;
        }
        MotionVector pred = syn.mode == PredMode::Ibc ? ibc_pred : inter_pred;
        syn.mv = {pred.dx + ddx, pred.dy + ddy};
    }
    for (LevelBlock8& lv : syn.levels) {
        if (!br.bit()) continue;
        int pos = 0;
        while (true) {
            uint32_t run = br.ue();
            if (run == 64) break;
            pos += int(run);
            if (pos >= 64) throw BitstreamError("coefficient run overflows block");
            int32_t level = br.se();
            if (level == 0) throw BitstreamError("zero coefficient level");
            lv[zigzag8()[pos]] = level;
            ++pos;
        }
    }
    return syn;
}

size_t cu_bits(const CuSyntax& syn, MotionVector mv_pred, bool ibc_full_pel) {
    BitCount c;
    emit_cu(c, syn, mv_pred, ibc_full_pel);
    return c.bits;
}

RefSurfaces FrameCtx::surfaces() const {
    RefSurfaces s;
    s.cur_y = &recon->y;
    s.cur_u = &recon->u;
    s.cur_v = &recon->v;
    if (has_t0) {
        s.t0_y = &t0_y;
        s.t0_u = &t0_u;
        s.t0_v = &t0_v;
        s.t0_pad = kTile0Pad;
    }
    s.prev_y = prev_y;
    s.prev_u = prev_u;
    s.prev_v = prev_v;
    s.prev_pad = kInterPad;
    return s;
}

ReferenceArea FrameCtx::area(int tile, int cx, int cy) const {
    return reference_area(tiles_mode() ? RefAreaMode::TileReference : RefAreaMode::RasterCausal,
                          layout, tile, cx, cy, hdr->border_extension);
}

MotionVector FrameCtx::ibc_pred_default(int tile) const {
    if (tiles_mode() && tile > 0) return {-4 * tile * layout.tile_width, 0};
    return {};
}

void FrameCtx::freeze_tile0() {
    const int w = layout.tile_width, h = layout.frame_height;
    Plane ty(w, h), tu(w / 2, h / 2), tv(w / 2, h / 2);
    for (int y = 0; y < h; ++y) std::memcpy(ty.row(y), recon->y.row(y), size_t(w));
    for (int y = 0; y < h / 2; ++y) {
        std::memcpy(tu.row(y), recon->u.row(y), size_t(w / 2));
        std::memcpy(tv.row(y), recon->v.row(y), size_t(w / 2));
    }
    t0_y = extend_borders(ty, kTile0Pad);
    t0_u = extend_borders(tu, kTile0Pad / 2);
    t0_v = extend_borders(tv, kTile0Pad / 2);
    has_t0 = true;
}

namespace {

void gather_column(const Plane& p, int x, int y0, int n, uint8_t* out) {
    for (int i = 0; i < n; ++i) out[i] = p.at(x, y0 + i);
}

void intra_cu(const FrameCtx& f, int tile, PredMode mode, int cx, int cy, CuBuffers* out) {
    const int rx0 = f.region_x0(tile);
    const Plane& ry = f.recon->y;
    const Plane& ru = f.recon->u;
    const Plane& rv = f.recon->v;

    uint8_t left_y[kCu], left_u[8], left_v[8];
    const bool have_top = cy > 0;
    const bool have_left = cx > rx0;
    if (have_left) {
        gather_column(ry, cx - 1, cy, kCu, left_y);
        gather_column(ru, cx / 2 - 1, cy / 2, 8, left_u);
        gather_column(rv, cx / 2 - 1, cy / 2, 8, left_v);
    }
    intra_predict(mode, have_top ? ry.row(cy - 1) + cx : nullptr,
                  have_left ? left_y : nullptr, kCu, out->y.data(), kCu);
    intra_predict(mode, have_top ? ru.row(cy / 2 - 1) + cx / 2 : nullptr,
                  have_left ? left_u : nullptr, 8, out->u.data(), 8);
    intra_predict(mode, have_top ? rv.row(cy / 2 - 1) + cx / 2 : nullptr,
                  have_left ? left_v : nullptr, 8, out->v.data(), 8);
}

}  // namespace

void predict_cu(const FrameCtx& f, int tile, PredMode mode, MotionVector mv,
                int cx, int cy, CuBuffers* out) {
    if (mode_is_intra(mode)) {
        intra_cu(f, tile, mode, cx, cy, out);
        return;
    }
    if (mode == PredMode::Ibc) {
        ResolvedRef rr;
        if (!resolve_ibc_ref(f.area(tile, cx, cy), f.surfaces(), mv, cx, cy, kCu, kCu, &rr))
            throw BitstreamError("illegal IBC vector");
        interpolate_luma(*rr.luma, mv, cx + rr.off_luma, cy + rr.off_luma, kCu, kCu,
                         out->y.data(), kCu);
        interpolate_chroma(*rr.cb, mv, cx / 2 + rr.off_chroma, cy / 2 + rr.off_chroma, 8, 8,
                           out->u.data(), 8);
        interpolate_chroma(*rr.cr, mv, cx / 2 + rr.off_chroma, cy / 2 + rr.off_chroma, 8, 8,
                           out->v.data(), 8);
        return;
    }
    // Inter, from the extended previous frame.
    if (!f.prev_y) throw BitstreamError("inter CU without reference frame");
    interpolate_luma(*f.prev_y, mv, cx + kInterPad, cy + kInterPad, kCu, kCu, out->y.data(), kCu);
    interpolate_chroma(*f.prev_u, mv, cx / 2 + kInterPad / 2, cy / 2 + kInterPad / 2, 8, 8,
                       out->u.data(), 8);
    interpolate_chroma(*f.prev_v, mv, cx / 2 + kInterPad / 2, cy / 2 + kInterPad / 2, 8, 8,
                       out->v.data(), 8);
}

namespace {

inline uint8_t clamp_u8(int v) { return uint8_t(std::clamp(v, 0, 255)); }

// One 8x8 transform block: reconstruct pred+levels into dst.
void recon_block(const uint8_t* pred, ptrdiff_t pred_stride, const LevelBlock8& lv, int qp,
                 uint8_t* dst, ptrdiff_t dst_stride) {
    if (!block_coded(lv)) {
        for (int y = 0; y < 8; ++y)
            std::memcpy(dst + y * dst_stride, pred + y * pred_stride, 8);
        return;
    }
    ResidualBlock8 res = inverse_transform8(dequantize(lv, qp));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            dst[y * dst_stride + x] = clamp_u8(int(pred[y * pred_stride + x]) + res[y * 8 + x]);
}

LevelBlock8 code_block(const uint8_t* orig, ptrdiff_t orig_stride, const uint8_t* pred,
                       ptrdiff_t pred_stride, int qp, bool intra) {
    ResidualBlock8 res{};
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            res[y * 8 + x] = int16_t(int(orig[y * orig_stride + x]) - pred[y * pred_stride + x]);
    return quantize(forward_transform8(res), qp, intra);
}

}  // namespace

void reconstruct_cu(const FrameCtx& f, const CuSyntax& syn, const CuBuffers& pred,
                    int qp, int cx, int cy) {
    Plane& ry = f.recon->y;
    for (int b = 0; b < 4; ++b) {
        int bx = (b & 1) * 8, by = (b >> 1) * 8;
        recon_block(pred.y.data() + by * kCu + bx, kCu, syn.levels[b], qp,
                    ry.row(cy + by) + cx + bx, ry.width);
    }
    recon_block(pred.u.data(), 8, syn.levels[4], qp, f.recon->u.row(cy / 2) + cx / 2,
                f.recon->u.width);
    recon_block(pred.v.data(), 8, syn.levels[5], qp, f.recon->v.row(cy / 2) + cx / 2,
                f.recon->v.width);
}

CuCandidate FrameEncoder::make_candidate(int tile, PredMode mode, MotionVector mvv, int cx,
                                         int cy, MotionVector mv_pred, int qp,
                                         double lambda) const {
    CuCandidate c;
    c.syn.mode = mode;
    c.syn.mv = mvv;

    CuBuffers pred;
    predict_cu(ctx_, tile, mode, mvv, cx, cy, &pred);

    const bool intra = mode != PredMode::Inter;  // IBC predicts within the picture
    const Plane& oy = orig_.y;
    for (int b = 0; b < 4; ++b) {
        int bx = (b & 1) * 8, by = (b >> 1) * 8;
        c.syn.levels[b] = code_block(oy.row(cy + by) + cx + bx, oy.width,
                                     pred.y.data() + by * kCu + bx, kCu, qp, intra);
    }
    c.syn.levels[4] = code_block(orig_.u.row(cy / 2) + cx / 2, orig_.u.width, pred.u.data(), 8,
                                 qp, intra);
    c.syn.levels[5] = code_block(orig_.v.row(cy / 2) + cx / 2, orig_.v.width, pred.v.data(), 8,
                                 qp, intra);

    // Reconstruct into scratch and measure the true distortion.
    CuBuffers rec;
    for (int b = 0; b < 4; ++b) {
        int bx = (b & 1) * 8, by = (b >> 1) * 8;
        recon_block(pred.y.data() + by * kCu + bx, kCu, c.syn.levels[b], qp,
                    rec.y.data() + by * kCu + bx, kCu);
    }
    recon_block(pred.u.data(), 8, c.syn.levels[4], qp, rec.u.data(), 8);
    recon_block(pred.v.data(), 8, c.syn.levels[5], qp, rec.v.data(), 8);

    const auto& k = kernels::active();
    c.ssd = k.ssd_u8(oy.row(cy) + cx, oy.width, rec.y.data(), kCu, kCu, kCu) +
            k.ssd_u8(orig_.u.row(cy / 2) + cx / 2, orig_.u.width, rec.u.data(), 8, 8, 8) +
            k.ssd_u8(orig_.v.row(cy / 2) + cx / 2, orig_.v.width, rec.v.data(), 8, 8, 8);
    c.bits = cu_bits(c.syn, mv_pred, !ctx_.hdr->quarter_pel_ibc);
    c.cost = double(c.ssd) + lambda * double(c.bits);
    return c;
}

std::vector<CuCandidate> FrameEncoder::evaluate_cu(int tile, int cx, int cy, const MvCtx& mv,
                                                   int qp) const {
    const double lambda = lambda_for_qp(qp, cfg_.lambda_scale);
    std::vector<CuCandidate> out;
    for (PredMode m : {PredMode::IntraDc, PredMode::IntraH, PredMode::IntraV})
        out.push_back(make_candidate(tile, m, {}, cx, cy, {}, qp, lambda));

    const bool ibc_possible = cfg_.enable_ibc && ctx_.hdr->coding_mode != CodingMode::Simulcast;
    if (ibc_possible) {
        ReferenceArea area = ctx_.area(tile, cx, cy);
        if (!area.empty()) {
            SearchParams sp;
            bool tiles = ctx_.tiles_mode();
            sp.range_h = cfg_.search_range_h >= 0 ? cfg_.search_range_h
                         : tiles                  ? 64
                                                  : ctx_.layout.frame_width();
            sp.range_v = cfg_.search_range_v >= 0 ? cfg_.search_range_v : 64;
            bool collocated = tiles && tile > 0 && cfg_.collocated_start;
            sp.start_x = collocated ? cx - tile * ctx_.layout.tile_width : cx;
            sp.start_y = cy;
            sp.fractional_refine = ctx_.hdr->quarter_pel_ibc;
            MotionVector pred = mv.ibc_pred(ctx_, tile);
            SearchResult r = ibc_search(orig_.y.row(cy) + cx, orig_.y.width, kCu, kCu, cx, cy,
                                        area, ctx_.surfaces(), sp, pred, lambda,
                                        !ctx_.hdr->quarter_pel_ibc);
            if (r.available)
                out.push_back(make_candidate(tile, PredMode::Ibc, r.mv, cx, cy, pred, qp, lambda));
        }
    }
    if (ctx_.inter_frame && ctx_.prev_y) {
        MotionVector pred = mv.inter_pred();
        SearchResult r = mcp_search(orig_.y.row(cy) + cx, orig_.y.width, kCu, kCu, cx, cy,
                                    ctx_.surfaces(), pred, lambda);
        if (r.available)
            out.push_back(make_candidate(tile, PredMode::Inter, r.mv, cx, cy, pred, qp, lambda));
    }
    return out;
}

void FrameEncoder::encode_cu(int tile, int cx, int cy, MvCtx& mv, int qp, BitWriter& bw,
                             TileStats* stats, FrameStats* fstats) {
    std::vector<CuCandidate> cands = evaluate_cu(tile, cx, cy, mv, qp);
    const CuCandidate* best = &cands[0];
    for (const CuCandidate& c : cands)
        if (c.cost < best->cost) best = &c;

    const bool full_pel = !ctx_.hdr->quarter_pel_ibc;
    MotionVector pred = best->syn.mode == PredMode::Ibc ? mv.ibc_pred(ctx_, tile)
                                                        : mv.inter_pred();
    emit_cu(bw, best->syn, pred, full_pel);

    CuBuffers predb;
    predict_cu(ctx_, tile, best->syn.mode, best->syn.mv, cx, cy, &predb);
    reconstruct_cu(ctx_, best->syn, predb, qp, cx, cy);

    if (stats) {
        stats->mode_cu[size_t(best->syn.mode)]++;
        if (mode_has_mv(best->syn.mode)) {
            int bits = mv_delta_bits(best->syn.mv, pred,
                                     best->syn.mode == PredMode::Ibc && full_pel);
            stats->mv_bits += uint64_t(bits);
            if (best->syn.mode == PredMode::Ibc) {
                stats->ibc_mv_count++;
                MotionVector d{best->syn.mv.dx - pred.dx, best->syn.mv.dy - pred.dy};
                stats->ibc_delta_abs_qpel += uint64_t(d.l1());
                if (cy >= ctx_.layout.frame_height / 2) stats->ibc_cu_lower_half++;
            }
        }
    }
    if (fstats && best->syn.mode == PredMode::Ibc && cx / ctx_.layout.tile_width > 0) {
        fstats->side_ibc_cu++;
        if (cy >= ctx_.layout.frame_height / 2) fstats->side_lower_ibc_cu++;
    }
    mv.update(best->syn);
}

std::vector<uint8_t> FrameEncoder::encode_tile(int tile, TileStats* stats, FrameStats* fstats) {
    BitWriter bw;
    MvCtx mv;
    const int qp = ctx_.hdr->tile_qp(ctx_.tiles_mode() ? tile : 0);
    for (int cy = 0; cy < ctx_.layout.frame_height; cy += kCu)
        for (int cx = ctx_.region_x0(tile); cx < ctx_.region_x1(tile); cx += kCu)
            encode_cu(tile, cx, cy, mv, qp, bw, stats, fstats);
    return bw.take();
}

void decode_tile_cus(FrameCtx& ctx, int tile, BitReader& br, int qp) {
    MvCtx mv;
    const bool full_pel = !ctx.hdr->quarter_pel_ibc;
    const bool ibc_allowed = ctx.hdr->coding_mode != CodingMode::Simulcast;
    for (int cy = 0; cy < ctx.layout.frame_height; cy += kCu) {
        for (int cx = ctx.region_x0(tile); cx < ctx.region_x1(tile); cx += kCu) {
            CuSyntax syn = parse_cu(br, ctx.inter_frame, ibc_allowed, full_pel,
                                    mv.ibc_pred(ctx, tile), mv.inter_pred());
            CuBuffers pred;
            predict_cu(ctx, tile, syn.mode, syn.mv, cx, cy, &pred);
            reconstruct_cu(ctx, syn, pred, qp, cx, cy);
            mv.update(syn);
        }
    }
}

}  // namespace detail

namespace {

using namespace detail;

void validate_encode_inputs(const std::vector<Sequence>& views, const CodecConfig& cfg) {
    const int n = int(views.size());
    if (n < 1 || n > 8) throw std::invalid_argument("encode: view count must be in [1, 8]");
    if (views[0].frames.empty()) throw std::invalid_argument("encode: no frames");
    const size_t frames = views[0].frames.size();
    const int w = views[0].frames[0].width(), h = views[0].frames[0].height();
    if (w <= 0 || h <= 0 || w % 16 || h % 16)
        throw std::invalid_argument("encode: view dimensions must be positive multiples of 16");
    for (const Sequence& s : views) {
        if (s.frames.size() != frames)
            throw std::invalid_argument("encode: views must have equal frame counts");
        for (const Frame& f : s.frames)
            if (f.width() != w || f.height() != h)
                throw std::invalid_argument("encode: all frames must share dimensions");
    }
    if (cfg.mode == CodingMode::AsccTiles && n < 2)
        throw std::invalid_argument("encode: ascc requires at least 2 views");
    if (cfg.base_qp < 0 || cfg.base_qp > 51)
        throw std::invalid_argument("encode: base_qp out of [0, 51]");
    if (!cfg.delta_qp.empty() && int(cfg.delta_qp.size()) != n)
        throw std::invalid_argument("encode: delta_qp size must equal view count");
    if (cfg.gop == GopKind::Ippp && cfg.intra_period < 1)
        throw std::invalid_argument("encode: intra_period must be >= 1");
    if (cfg.search_range_h < -1 || cfg.search_range_v < -1)
        throw std::invalid_argument("encode: negative search range");
}

SequenceHeader make_header(const std::vector<Sequence>& views, const ViewOrder& order,
                           const CodecConfig& cfg) {
    const int n = int(views.size());
    SequenceHeader h;
    h.view_width = views[0].frames[0].width();
    h.view_height = views[0].frames[0].height();
    h.n_views = n;
    h.view_order = order.permutation;
    h.coding_mode = cfg.mode;
    h.base_qp = cfg.base_qp;
    h.delta_qp.assign(size_t(n), 0);
    if (cfg.mode == CodingMode::AsccTiles && !cfg.delta_qp.empty()) h.delta_qp = cfg.delta_qp;
    h.quarter_pel_ibc = cfg.mode != CodingMode::Simulcast && cfg.quarter_pel_ibc;
    h.per_tile_filtering = cfg.mode == CodingMode::AsccTiles && cfg.per_tile_filtering;
    h.border_extension = cfg.mode == CodingMode::AsccTiles && cfg.border_extension;
    h.deblock_enabled = cfg.deblock;
    h.sao_enabled = cfg.sao;
    h.gop = cfg.gop;
    h.intra_period = cfg.intra_period;
    h.frame_count = int(views[0].frames.size());
    return h;
}

bool frame_is_inter(const SequenceHeader& h, int f) {
    return h.gop == GopKind::Ippp && f % h.intra_period != 0;
}

std::vector<uint8_t> sao_payload_prefix(const SequenceHeader& hdr, const SaoParams& sao) {
    if (!hdr.sao_enabled) return {};
    BitWriter bw;
    bw.ue(uint32_t(sao.start_band));
    for (int o : sao.offsets) bw.se(o);
    return bw.take();
}

SaoParams read_sao_prefix(const SequenceHeader& hdr, BitReader& br) {
    SaoParams sao;
    if (!hdr.sao_enabled) return sao;
    sao.start_band = int(br.ue());
    if (sao.start_band > 28) throw BitstreamError("sao start_band out of range");
    for (int& o : sao.offsets) {
        o = br.se();
        if (o < -7 || o > 7) throw BitstreamError("sao offset out of range");
    }
    br.align();
    return sao;
}

// Frame-end filtering for modes without per-tile filtering: one deblock
// region spanning the frame, then the per-tile SAO pass.
void filter_frame_end_encode(const SequenceHeader& hdr, const PackedLayout& layout,
                             const Plane& orig_y, Plane& recon_y, int n_tiles,
                             std::vector<SaoParams>* saos) {
    const int w = layout.frame_width(), h = layout.frame_height;
    if (hdr.deblock_enabled) deblock_tile(recon_y, 0, 0, w, h, hdr.base_qp);
    if (hdr.sao_enabled) {
        for (int t = 0; t < n_tiles; ++t) {
            int x0 = n_tiles == 1 ? 0 : layout.tile_x0(t);
            int x1 = n_tiles == 1 ? w : layout.tile_x0(t + 1);
            (*saos)[t] = sao_estimate(orig_y, recon_y, x0, 0, x1, h);
            sao_apply(recon_y, (*saos)[t], x0, 0, x1, h);
        }
    }
}

void filter_frame_end_decode(const SequenceHeader& hdr, const PackedLayout& layout,
                             Plane& recon_y, int n_tiles, const std::vector<SaoParams>& saos) {
    const int w = layout.frame_width(), h = layout.frame_height;
    if (hdr.deblock_enabled) deblock_tile(recon_y, 0, 0, w, h, hdr.base_qp);
    if (hdr.sao_enabled) {
        for (int t = 0; t < n_tiles; ++t) {
            int x0 = n_tiles == 1 ? 0 : layout.tile_x0(t);
            int x1 = n_tiles == 1 ? w : layout.tile_x0(t + 1);
            sao_apply(recon_y, saos[t], x0, 0, x1, h);
        }
    }
}

EncodeResult encode_packed(const std::vector<Sequence>& views, const CodecConfig& cfg) {
    const int n = int(views.size());
    ViewOrder order = view_packing_order(n);
    SequenceHeader hdr = make_header(views, order, cfg);

    EncodeResult res;
    res.bytes = write_header(hdr);
    res.recon_views.assign(size_t(n), Sequence{{}, views[0].fps});

    Plane prev_y, prev_u, prev_v;
    bool have_prev = false;

    for (int f = 0; f < hdr.frame_count; ++f) {
        auto t_start = std::chrono::steady_clock::now();
        std::vector<Frame> at_f;
        at_f.reserve(size_t(n));
        for (const Sequence& s : views) at_f.push_back(s.frames[size_t(f)]);
        auto [packed, layout] = pack(at_f, order);

        Frame recon(packed.width(), packed.height());
        FrameCtx ctx;
        ctx.hdr = &hdr;
        ctx.layout = layout;
        ctx.inter_frame = frame_is_inter(hdr, f) && have_prev;
        ctx.recon = &recon;
        if (ctx.inter_frame) {
            ctx.prev_y = &prev_y;
            ctx.prev_u = &prev_u;
            ctx.prev_v = &prev_v;
        }

        FrameEncoder enc(ctx, packed, cfg);
        const int n_tiles = ctx.n_coding_tiles();
        FrameStats fs;
        fs.frame_index = f;
        fs.intra_frame = !ctx.inter_frame;
        fs.tiles.resize(size_t(n_tiles));

        std::vector<std::vector<uint8_t>> cu_payloads;
        cu_payloads.resize(size_t(n_tiles));
        std::vector<SaoParams> saos;
        saos.resize(size_t(n_tiles));
        for (int t = 0; t < n_tiles; ++t) {
            cu_payloads[size_t(t)] = enc.encode_tile(t, &fs.tiles[size_t(t)], &fs);
            if (hdr.per_tile_filtering) {
                saos[size_t(t)] = filter_tile(packed.y, recon.y, ctx.region_x0(t), 0,
                                              ctx.region_x1(t), layout.frame_height,
                                              hdr.tile_qp(t),
                                              {hdr.deblock_enabled, hdr.sao_enabled});
            }
            if (ctx.tiles_mode() && t == 0) ctx.freeze_tile0();
        }
        if (!hdr.per_tile_filtering)
            filter_frame_end_encode(hdr, layout, packed.y, recon.y, n_tiles, &saos);

        std::vector<std::vector<uint8_t>> payloads;
        payloads.resize(size_t(n_tiles));
        for (int t = 0; t < n_tiles; ++t) {
            payloads[size_t(t)] = sao_payload_prefix(hdr, saos[size_t(t)]);
            payloads[size_t(t)].insert(payloads[size_t(t)].end(), cu_payloads[size_t(t)].begin(),
                                       cu_payloads[size_t(t)].end());
        }
        size_t before = res.bytes.size();
        write_frame_payload(res.bytes, payloads);
        fs.bits = 8 * uint64_t(res.bytes.size() - before);
        for (int t = 0; t < n_tiles; ++t) fs.tiles[size_t(t)].bits = 8 * payloads[size_t(t)].size();

        PsnrValue p = psnr(packed.y, recon.y);
        fs.psnr_y_inf = p.infinite;
        fs.psnr_y = p.db;

        std::vector<Frame> rec_views = unpack(recon, layout, order);
        for (int v = 0; v < n; ++v)
            res.recon_views[size_t(v)].frames.push_back(std::move(rec_views[size_t(v)]));

        if (hdr.gop == GopKind::Ippp) {
            prev_y = extend_borders(recon.y, kInterPad);
            prev_u = extend_borders(recon.u, kInterPad / 2);
            prev_v = extend_borders(recon.v, kInterPad / 2);
            have_prev = true;
        }
        fs.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        res.stats.push_back(std::move(fs));
    }
    return res;
}

}  // namespace

EncodeResult encode_sequence(const std::vector<Sequence>& views, const CodecConfig& config) {
    validate_encode_inputs(views, config);
    const int n = int(views.size());
    if (config.mode == CodingMode::Simulcast && n > 1) {
        // Independent per-view streams behind one master header.
        SequenceHeader hdr;
        hdr.view_width = views[0].frames[0].width();
        hdr.view_height = views[0].frames[0].height();
        hdr.n_views = n;
        hdr.view_order.resize(size_t(n));
        for (int i = 0; i < n; ++i) hdr.view_order[size_t(i)] = i;
        hdr.delta_qp.assign(size_t(n), 0);
        hdr.coding_mode = CodingMode::Simulcast;
        hdr.base_qp = config.base_qp;
        hdr.deblock_enabled = config.deblock;
        hdr.sao_enabled = config.sao;
        hdr.gop = config.gop;
        hdr.intra_period = config.intra_period;
        hdr.frame_count = int(views[0].frames.size());

        EncodeResult res;
        res.bytes = write_header(hdr);
        for (int v = 0; v < n; ++v) {
            EncodeResult sub = encode_sequence({views[size_t(v)]}, config);
            append_u32le(res.bytes, uint32_t(sub.bytes.size()));
            res.bytes.insert(res.bytes.end(), sub.bytes.begin(), sub.bytes.end());
            for (FrameStats& fs : sub.stats) {
                fs.view_index = v;
                res.stats.push_back(std::move(fs));
            }
            res.recon_views.push_back(std::move(sub.recon_views[0]));
        }
        return res;
    }
    return encode_packed(views, config);
}

DecodeResult decode_sequence(const std::vector<uint8_t>& bytes) {
    ByteCursor cur(bytes);
    DecodeResult res;
    res.header = read_header(cur);
    const SequenceHeader& hdr = res.header;
    const int n = hdr.n_views;

    if (hdr.coding_mode == CodingMode::Simulcast && n > 1) {
        res.views.assign(size_t(n), Sequence{});
        for (int v = 0; v < n; ++v) {
            std::vector<uint8_t> sub;
            try {
                uint32_t len = cur.read_u32le();
                const uint8_t* p = cur.read_bytes(len);
                sub.assign(p, p + len);
            } catch (const BitstreamError& e) {
                res.error = "view " + std::to_string(v) + ": " + e.what();
                return res;
            }
            try {
                DecodeResult dv = decode_sequence(sub);
                res.views[size_t(v)] = std::move(dv.views[0]);
                for (auto& st : dv.frames) res.frames.push_back(std::move(st));
                if (!dv.error.empty() && res.error.empty())
                    res.error = "view " + std::to_string(v) + ": " + dv.error;
            } catch (const BitstreamError& e) {
                res.error = "view " + std::to_string(v) + ": " + e.what();
            }
        }
        if (res.error.empty() && !cur.at_end()) res.error = "trailing bytes after last view";
        return res;
    }

    PackedLayout layout{n, hdr.view_width, hdr.view_height};
    ViewOrder order{hdr.view_order};
    res.views.assign(size_t(n), Sequence{});

    Plane prev_y, prev_u, prev_v;
    bool have_prev = false;

    for (int f = 0; f < hdr.frame_count; ++f) {
        int err_tile = -1;
        try {
            std::vector<std::vector<uint8_t>> payloads = read_frame_payload(cur);
            Frame recon(layout.frame_width(), layout.frame_height);
            FrameCtx ctx;
            ctx.hdr = &hdr;
            ctx.layout = layout;
            ctx.inter_frame = frame_is_inter(hdr, f) && have_prev;
            ctx.recon = &recon;
            if (ctx.inter_frame) {
                ctx.prev_y = &prev_y;
                ctx.prev_u = &prev_u;
                ctx.prev_v = &prev_v;
            }
            const int n_tiles = ctx.n_coding_tiles();
            if (int(payloads.size()) != n_tiles)
                throw BitstreamError("expected " + std::to_string(n_tiles) + " tile payloads, got " +
                                     std::to_string(payloads.size()));

            DecodeFrameStats ds;
            ds.bits = 8 * uint64_t(4 + payloads.size() * 4);
            std::vector<SaoParams> saos;
            saos.resize(size_t(n_tiles));
            for (int t = 0; t < n_tiles; ++t) {
                err_tile = t;
                const auto& pl = payloads[size_t(t)];
                ds.tile_bits.push_back(8 * uint64_t(pl.size()));
                ds.bits += 8 * uint64_t(pl.size());
                BitReader br(pl);
                saos[size_t(t)] = read_sao_prefix(hdr, br);
                decode_tile_cus(ctx, t, br, hdr.tile_qp(ctx.tiles_mode() ? t : 0));
                if (br.bits_left() >= 8) throw BitstreamError("trailing garbage in tile payload");
                while (br.bits_left())
                    if (br.bit()) throw BitstreamError("nonzero padding in tile payload");
                if (hdr.per_tile_filtering) {
                    if (hdr.deblock_enabled)
                        deblock_tile(recon.y, ctx.region_x0(t), 0, ctx.region_x1(t),
                                     layout.frame_height, hdr.tile_qp(t));
                    if (hdr.sao_enabled)
                        sao_apply(recon.y, saos[size_t(t)], ctx.region_x0(t), 0, ctx.region_x1(t),
                                  layout.frame_height);
                }
                if (ctx.tiles_mode() && t == 0) ctx.freeze_tile0();
            }
            err_tile = -1;
            if (!hdr.per_tile_filtering)
                filter_frame_end_decode(hdr, layout, recon.y, n_tiles, saos);

            std::vector<Frame> dec_views = unpack(recon, layout, order);
            for (int v = 0; v < n; ++v)
                res.views[size_t(v)].frames.push_back(std::move(dec_views[size_t(v)]));
            res.frames.push_back(std::move(ds));

            if (hdr.gop == GopKind::Ippp) {
                prev_y = extend_borders(recon.y, kInterPad);
                prev_u = extend_borders(recon.u, kInterPad / 2);
                prev_v = extend_borders(recon.v, kInterPad / 2);
                have_prev = true;
            }
        } catch (const BitstreamError& e) {
            res.error = "frame " + std::to_string(f) +
                        (err_tile >= 0 ? ", tile " + std::to_string(err_tile) : "") + ": " + e.what();
            return res;
        }
    }
    if (!cur.at_end()) res.error = "trailing bytes after last frame";
    return res;
}

}  // namespace mvsc
