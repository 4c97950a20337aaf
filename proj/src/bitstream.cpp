#include "mvsc/bitstream.hpp"

#include <bit>
#include <cstring>

namespace mvsc {

void BitWriter::put_bit(int b) {
    if (used_ == 8) {
        bytes_.push_back(0);
        used_ = 0;
    }
    if (b) bytes_.back() |= uint8_t(0x80u >> used_);
    ++used_;
}

void BitWriter::put_bits(uint32_t v, int n) {
    for (int i = n - 1; i >= 0; --i) put_bit(int((v >> i) & 1u));
}

void BitWriter::ue(uint32_t v) {
    uint32_t n = v + 1;  // v < 2^32-1 by construction of all call sites
    int len = std::bit_width(n);
    for (int i = 0; i < len - 1; ++i) put_bit(0);
    put_bits(n, len);
}

void BitWriter::se(int32_t v) {
    uint32_t k = v > 0 ? uint32_t(2 * int64_t(v) - 1) : uint32_t(-2 * int64_t(v));
    ue(k);
}

void BitWriter::align() {
    while (used_ != 8 && used_ != 0) put_bit(0);
}

std::vector<uint8_t> BitWriter::take() {
    align();
    used_ = 8;
    return std::move(bytes_);
}

int BitReader::bit() {
    if (pos_ >= size_ * 8) throw BitstreamError("bitstream truncated");
    int b = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return b;
}

uint32_t BitReader::bits(int n) {
    uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | uint32_t(bit());
    return v;
}

uint32_t BitReader::ue() {
    int zeros = 0;
    while (bit() == 0) {
        if (++zeros > 32) throw BitstreamError("malformed exp-golomb code");
    }
    uint32_t n = 1;
    for (int i = 0; i < zeros; ++i) n = (n << 1) | uint32_t(bit());
    return n - 1;
}

int32_t BitReader::se() {
    uint32_t k = ue();
    return (k & 1) ? int32_t((k + 1) / 2) : -int32_t(k / 2);
}

void BitReader::align() {
    pos_ = (pos_ + 7) / 8 * 8;
}

int ue_length(uint32_t v) {
    return 2 * (std::bit_width(v + 1) - 1) + 1;
}

int se_length(int32_t v) {
    uint32_t k = v > 0 ? uint32_t(2 * int64_t(v) - 1) : uint32_t(-2 * int64_t(v));
    return ue_length(k);
}

const char* coding_mode_name(CodingMode m) {
    switch (m) {
        case CodingMode::Simulcast: return "simulcast";
        case CodingMode::SccRaster: return "scc";
        case CodingMode::AsccTiles: return "ascc";
    }
    return "?";
}

int SequenceHeader::tile_qp(int tile) const {
    int dq = tile < int(delta_qp.size()) ? delta_qp[tile] : 0;
    int qp = base_qp + dq;
    return qp < 0 ? 0 : (qp > 51 ? 51 : qp);
}

namespace {

constexpr char kMagic[4] = {'M', 'V', 'S', 'C'};

void validate_header(const SequenceHeader& h) {
    if (h.view_width <= 0 || h.view_height <= 0 || h.view_width % 16 || h.view_height % 16)
        throw BitstreamError("header: view dimensions must be positive multiples of 16");
    if (h.n_views < 1 || h.n_views > 8) throw BitstreamError("header: n_views out of [1, 8]");
    if (int(h.view_order.size()) != h.n_views || int(h.delta_qp.size()) != h.n_views)
        throw BitstreamError("header: view_order/delta_qp length must equal n_views");
    std::vector<bool> seen(h.n_views, false);
    for (int v : h.view_order) {
        if (v < 0 || v >= h.n_views || seen[v]) throw BitstreamError("header: invalid view permutation");
        seen[v] = true;
    }
    if (h.base_qp < 0 || h.base_qp > 51) throw BitstreamError("header: base_qp out of [0, 51]");
    if (h.delta_qp[0] != 0) throw BitstreamError("header: tile 0 delta_qp must be 0");
    for (int d : h.delta_qp) {
        int qp = h.base_qp + d;
        if (qp < 0 || qp > 51) throw BitstreamError("header: delta_qp pushes tile QP outside [0, 51]");
    }
    if (h.coding_mode != CodingMode::AsccTiles)
        for (int d : h.delta_qp)
            if (d != 0) throw BitstreamError("header: delta_qp requires ascc mode");
    if (h.intra_period < 1) throw BitstreamError("header: intra_period must be >= 1");
    if (h.frame_count < 0) throw BitstreamError("header: negative frame_count");
}

}  // namespace

std::vector<uint8_t> write_header(const SequenceHeader& h) {
    validate_header(h);
    std::vector<uint8_t> out(kMagic, kMagic + 4);
    out.push_back(kFormatVersion);
    BitWriter bw;
    bw.ue(uint32_t(h.view_width));
    bw.ue(uint32_t(h.view_height));
    bw.ue(uint32_t(h.n_views));
    if (h.n_views > 1) {
        for (int v : h.view_order) bw.ue(uint32_t(v));
        for (int d : h.delta_qp) bw.se(d);
    }
    bw.ue(uint32_t(h.coding_mode));
    bw.ue(uint32_t(h.base_qp));
    bw.put_bit(h.quarter_pel_ibc);
    bw.put_bit(h.per_tile_filtering);
    bw.put_bit(h.border_extension);
    bw.put_bit(h.deblock_enabled);
    bw.put_bit(h.sao_enabled);
    bw.put_bit(h.gop == GopKind::Ippp);
    bw.ue(uint32_t(h.intra_period));
    bw.ue(uint32_t(h.frame_count));
    auto bits = bw.take();
    out.insert(out.end(), bits.begin(), bits.end());
    return out;
}

uint32_t ByteCursor::read_u32le() {
    const uint8_t* p = read_bytes(4);
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

const uint8_t* ByteCursor::read_bytes(size_t n) {
    if (pos_ + n > size_) throw BitstreamError("stream truncated");
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
}

SequenceHeader read_header(ByteCursor& in) {
    const uint8_t* magic = in.read_bytes(4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw BitstreamError("not an MVSC stream");
    uint8_t version = *in.read_bytes(1);
    if (version != kFormatVersion)
        throw BitstreamError("unsupported MVSC version " + std::to_string(version));

    // Header bit fields extend to the next byte boundary; parse from the
    // remaining buffer and advance the cursor by the consumed bytes.
    BitReader br(in.read_bytes(0), in.remaining());
    SequenceHeader h;
    h.view_width = int(br.ue());
    h.view_height = int(br.ue());
    h.n_views = int(br.ue());
    if (h.n_views < 1 || h.n_views > 8) throw BitstreamError("header: n_views out of [1, 8]");
    h.view_order.resize(h.n_views);
    h.delta_qp.resize(h.n_views);
    if (h.n_views > 1) {
        for (int& v : h.view_order) v = int(br.ue());
        for (int& d : h.delta_qp) d = br.se();
    } else {
        h.view_order = {0};
        h.delta_qp = {0};
    }
    uint32_t mode = br.ue();
    if (mode > 2) throw BitstreamError("unsupported mode " + std::to_string(mode));
    h.coding_mode = CodingMode(mode);
    h.base_qp = int(br.ue());
    h.quarter_pel_ibc = br.bit();
    h.per_tile_filtering = br.bit();
    h.border_extension = br.bit();
    h.deblock_enabled = br.bit();
    h.sao_enabled = br.bit();
    h.gop = br.bit() ? GopKind::Ippp : GopKind::AllIntra;
    h.intra_period = int(br.ue());
    h.frame_count = int(br.ue());
    br.align();
    in.read_bytes(br.bit_pos() / 8);
    validate_header(h);
    return h;
}

void append_u32le(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 24));
}

void write_frame_payload(std::vector<uint8_t>& out,
                         const std::vector<std::vector<uint8_t>>& tile_payloads) {
    size_t total = 0;
    for (const auto& t : tile_payloads) total += 4 + t.size();
    append_u32le(out, uint32_t(total));
    for (const auto& t : tile_payloads) {
        append_u32le(out, uint32_t(t.size()));
        out.insert(out.end(), t.begin(), t.end());
    }
}

std::vector<std::vector<uint8_t>> read_frame_payload(ByteCursor& in) {
    uint32_t total = in.read_u32le();
    size_t end = in.pos() + total;
    if (end > in.pos() + in.remaining()) throw BitstreamError("frame payload truncated");
    std::vector<std::vector<uint8_t>> tiles;
    while (in.pos() < end) {
        uint32_t n = in.read_u32le();
        if (in.pos() + n > end) throw BitstreamError("tile payload overruns frame payload");
        const uint8_t* p = in.read_bytes(n);
        tiles.emplace_back(p, p + n);
    }
    if (in.pos() != end) throw BitstreamError("frame payload length mismatch");
    return tiles;
}

}  // namespace mvsc
