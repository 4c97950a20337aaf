#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mvsc/bitstream.hpp"
#include "mvsc/frame.hpp"

namespace mvsc {

struct CodecConfig {
    CodingMode mode = CodingMode::AsccTiles;
    int base_qp = 32;
    std::vector<int> delta_qp;  // per tile; empty means all zero
    GopKind gop = GopKind::AllIntra;
    int intra_period = 8;
    // -1 = auto: +-64 for ascc tiles; full frame width horizontally for
    // raster IBC (the whole causal area is the natural window there)
    int search_range_h = -1;
    int search_range_v = -1;
    bool quarter_pel_ibc = true;     // false forces full-pel IBC vectors
    bool enable_ibc = true;          // encoder-side; Simulcast ignores it
    bool collocated_start = true;    // encoder-side IBC window placement
    bool per_tile_filtering = true;
    bool border_extension = true;
    bool deblock = true;
    bool sao = true;
    double lambda_scale = 1.0;
};

/// RD multiplier: scale * 0.85 * 2^((qp-12)/3).
double lambda_for_qp(int qp, double scale);

struct TileStats {
    uint64_t bits = 0;                   // payload bits, excluding framing
    std::array<uint32_t, 5> mode_cu{};   // indexed by PredMode
    uint32_t ibc_cu_lower_half = 0;      // IBC CUs with cu_y >= frame_h/2
    uint64_t mv_bits = 0;                // signaled vector delta bits
    uint64_t ibc_delta_abs_qpel = 0;     // sum |ddx|+|ddy| of signaled IBC deltas
    uint32_t ibc_mv_count = 0;
};

struct FrameStats {
    int frame_index = 0;
    int view_index = -1;  // >= 0 only for simulcast sub-streams
    bool intra_frame = true;
    uint64_t bits = 0;    // including framing
    std::vector<TileStats> tiles;  // one per payload tile (ascc: per view tile)
    // IBC CUs positioned in side view-tiles, attributable in any packed mode
    uint32_t side_ibc_cu = 0;
    uint32_t side_lower_ibc_cu = 0;  // of those, in the lower half of the frame
    bool psnr_y_inf = false;
    double psnr_y = 0.0;  // packed-frame luma, encoder reconstruction
    double seconds = 0.0;
};

struct EncodeResult {
    std::vector<uint8_t> bytes;
    std::vector<FrameStats> stats;
    std::vector<Sequence> recon_views;  // encoder-side reconstruction, camera order
};

// Views are camera-ordered (left to right), equal-sized, with dimensions
// multiples of 16 (pad_replicate first). Packing order, tile scheduling and
// the filter pipeline follow the coding mode.
EncodeResult encode_sequence(const std::vector<Sequence>& views, const CodecConfig& config);

struct DecodeFrameStats {
    uint64_t bits = 0;
    std::vector<uint64_t> tile_bits;
};

struct DecodeResult {
    SequenceHeader header;
    std::vector<Sequence> views;  // camera order
    std::vector<DecodeFrameStats> frames;
    std::string error;  // nonempty if the stream ended early; decoded frames are kept
};

// Throws BitstreamError for header-level problems; mid-stream errors are
// reported in DecodeResult::error with the frame/tile position, and frames
// decoded before the error are returned.
DecodeResult decode_sequence(const std::vector<uint8_t>& bytes);

}  // namespace mvsc
