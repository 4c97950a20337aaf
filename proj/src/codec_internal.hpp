#pragma once

// Encoder/decoder internals, shared between codec.cpp and the white-box
// tests (mode-decision oracle, causality checks).

#include <array>
#include <optional>

#include "mvsc/codec.hpp"
#include "mvsc/loop_filter.hpp"
#include "mvsc/packing.hpp"
#include "mvsc/prediction.hpp"
#include "mvsc/transform.hpp"

namespace mvsc::detail {

constexpr int kCu = 16;

inline bool mode_has_mv(PredMode m) { return m == PredMode::Ibc || m == PredMode::Inter; }
inline bool mode_is_intra(PredMode m) {
    return m == PredMode::IntraDc || m == PredMode::IntraH || m == PredMode::IntraV;
}

const std::array<int, 64>& zigzag8();

struct CuSyntax {
    PredMode mode = PredMode::IntraDc;
    MotionVector mv;                       // absolute vector for Ibc/Inter
    std::array<LevelBlock8, 6> levels{};   // Y 2x2 raster, then U, V
};

struct CuBuffers {
    std::array<uint8_t, kCu * kCu> y{};
    std::array<uint8_t, 64> u{}, v{};
};

/// Counting sink with the BitWriter field interface, for RD bit estimates.
struct BitCount {
    size_t bits = 0;
    void put_bit(int) { ++bits; }
    void put_bits(uint32_t, int n) { bits += size_t(n); }
    void ue(uint32_t v) { bits += size_t(ue_length(v)); }
    void se(int32_t v) { bits += size_t(se_length(v)); }
};

template <class Sink>
void emit_levels(Sink& s, const LevelBlock8& lv) {
    const auto& zz = zigzag8();
    uint32_t run = 0;
    for (int i = 0; i < 64; ++i) {
        int32_t v = lv[zz[i]];
        if (v == 0) {
            ++run;
        } else {
            s.ue(run);
            s.se(v);
            run = 0;
        }
    }
    s.ue(64);  // end of block
}

inline bool block_coded(const LevelBlock8& lv) {
    for (int32_t v : lv)
        if (v) return true;
    return false;
}

// ibc_full_pel: IBC vector deltas signaled in full-pel units.
template <class Sink>
void emit_cu(Sink& s, const CuSyntax& syn, MotionVector mv_pred, bool ibc_full_pel) {
    s.ue(uint32_t(syn.mode));
    if (mode_has_mv(syn.mode)) {
        int ddx = syn.mv.dx - mv_pred.dx;
        int ddy = syn.mv.dy - mv_pred.dy;
        if (syn.mode == PredMode::Ibc && ibc_full_pel) {
            ddx /= 4;
            ddy /= 4;
        }
        s.se(ddx);
        s.se(ddy);
    }
    for (const LevelBlock8& lv : syn.levels) {
        bool cbf = block_coded(lv);
        s.put_bit(cbf);
        if (cbf) emit_levels(s, lv);
    }
}

CuSyntax parse_cu(BitReader& br, bool inter_allowed, bool ibc_allowed, bool ibc_full_pel,
                  MotionVector ibc_pred, MotionVector inter_pred);

size_t cu_bits(const CuSyntax& syn, MotionVector mv_pred, bool ibc_full_pel);

/// Per-frame coding state shared by encoder and decoder: the packed
/// reconstruction under construction, the frozen tile-0 reference and the
/// extended previous frame.
struct FrameCtx {
    const SequenceHeader* hdr = nullptr;
    PackedLayout layout;
    bool inter_frame = false;
    Frame* recon = nullptr;

    Plane t0_y, t0_u, t0_v;
    bool has_t0 = false;

    const Plane* prev_y = nullptr;  // extended by kInterPad, or null
    const Plane* prev_u = nullptr;
    const Plane* prev_v = nullptr;

    bool tiles_mode() const { return hdr->coding_mode == CodingMode::AsccTiles; }
    int n_coding_tiles() const { return tiles_mode() ? layout.n_tiles : 1; }
    int region_x0(int tile) const { return tiles_mode() ? layout.tile_x0(tile) : 0; }
    int region_x1(int tile) const {
        return tiles_mode() ? layout.tile_x0(tile + 1) : layout.frame_width();
    }

    RefSurfaces surfaces() const;
    ReferenceArea area(int tile, int cx, int cy) const;
    MotionVector ibc_pred_default(int tile) const;

    // Snapshot + extend tile 0 of the current reconstruction as the side
    // tiles' reference surface.
    void freeze_tile0();
};

struct MvCtx {
    std::optional<MotionVector> last_ibc;
    std::optional<MotionVector> last_inter;

    MotionVector ibc_pred(const FrameCtx& f, int tile) const {
        return last_ibc ? *last_ibc : f.ibc_pred_default(tile);
    }
    MotionVector inter_pred() const { return last_inter ? *last_inter : MotionVector{}; }
    void update(const CuSyntax& syn) {
        if (syn.mode == PredMode::Ibc) last_ibc = syn.mv;
        if (syn.mode == PredMode::Inter) last_inter = syn.mv;
    }
};

void predict_cu(const FrameCtx& f, int tile, PredMode mode, MotionVector mv,
                int cx, int cy, CuBuffers* out);

// Applies the syntax's levels to the prediction and writes the CU into the
// reconstruction frame.
void reconstruct_cu(const FrameCtx& f, const CuSyntax& syn, const CuBuffers& pred,
                    int qp, int cx, int cy);

struct CuCandidate {
    CuSyntax syn;
    uint64_t ssd = 0;  // luma + chroma reconstruction SSD
    size_t bits = 0;
    double cost = 0.0;
};

/// Encodes the coding units of one frame; tests drive it CU by CU.
class FrameEncoder {
  public:
    FrameEncoder(FrameCtx& ctx, const Frame& orig, const CodecConfig& cfg)
        : ctx_(ctx), orig_(orig), cfg_(cfg) {}

    // All permitted candidates for this CU in tie-break order.
    std::vector<CuCandidate> evaluate_cu(int tile, int cx, int cy, const MvCtx& mv, int qp) const;

    // Encode one CU: pick the candidate, emit syntax, reconstruct, update
    // contexts and stats.
    void encode_cu(int tile, int cx, int cy, MvCtx& mv, int qp, BitWriter& bw,
                   TileStats* stats, FrameStats* fstats);

    // Whole tile (coding region) in raster order; returns the CU payload bytes.
    std::vector<uint8_t> encode_tile(int tile, TileStats* stats, FrameStats* fstats);

  private:
    CuCandidate make_candidate(int tile, PredMode mode, MotionVector mvv, int cx, int cy,
                               MotionVector mv_pred, int qp, double lambda) const;
    FrameCtx& ctx_;
    const Frame& orig_;
    const CodecConfig& cfg_;
};

// CU payload of one tile -> reconstruction. Throws BitstreamError on corrupt
// or non-causal syntax.
void decode_tile_cus(FrameCtx& ctx, int tile, BitReader& br, int qp);

}  // namespace mvsc::detail
