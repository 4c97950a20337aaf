#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvsc {

struct BitstreamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// MSB-first bit packer.
class BitWriter {
  public:
    void put_bit(int b);
    void put_bits(uint32_t v, int n);  // n <= 32, MSB first
    void ue(uint32_t v);
    void se(int32_t v);
    void align();  // zero-pad to a byte boundary
    size_t bit_count() const { return bytes_.size() * 8 - (8 - used_) % 8; }
    std::vector<uint8_t> take();

  private:
    std::vector<uint8_t> bytes_;
    int used_ = 8;  // bits used in the last byte
};

class BitReader {
  public:
    BitReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
    explicit BitReader(const std::vector<uint8_t>& v) : BitReader(v.data(), v.size()) {}

    int bit();
    uint32_t bits(int n);
    uint32_t ue();
    int32_t se();
    void align();
    size_t bit_pos() const { return pos_; }
    bool byte_aligned() const { return pos_ % 8 == 0; }
    size_t bits_left() const { return size_ * 8 - pos_; }

  private:
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

// Exp-Golomb code lengths in bits.
int ue_length(uint32_t v);
int se_length(int32_t v);

enum class CodingMode : uint8_t { Simulcast = 0, SccRaster = 1, AsccTiles = 2 };
enum class GopKind : uint8_t { AllIntra = 0, Ippp = 1 };

const char* coding_mode_name(CodingMode m);

/// Sequence header ("MVSC" + version), including the multiview extension:
/// view order permutation and per-tile delta QP.
struct SequenceHeader {
    int view_width = 0;
    int view_height = 0;
    int n_views = 1;
    std::vector<int> view_order;  // tile index -> camera index
    CodingMode coding_mode = CodingMode::Simulcast;
    int base_qp = 32;
    std::vector<int> delta_qp;  // per tile, tile 0 entry always 0
    bool quarter_pel_ibc = false;
    bool per_tile_filtering = false;
    bool border_extension = false;
    bool deblock_enabled = true;
    bool sao_enabled = true;
    GopKind gop = GopKind::AllIntra;
    int intra_period = 8;
    int frame_count = 0;

    int tile_qp(int tile) const;
    bool operator==(const SequenceHeader&) const = default;
};

constexpr uint8_t kFormatVersion = 1;

std::vector<uint8_t> write_header(const SequenceHeader& h);

/// Sequential reader over a byte buffer; frame payloads are length-prefixed.
class ByteCursor {
  public:
    ByteCursor(const uint8_t* data, size_t size) : data_(data), size_(size) {}
    explicit ByteCursor(const std::vector<uint8_t>& v) : ByteCursor(v.data(), v.size()) {}

    uint32_t read_u32le();
    const uint8_t* read_bytes(size_t n);
    size_t pos() const { return pos_; }
    size_t remaining() const { return size_ - pos_; }
    bool at_end() const { return pos_ == size_; }

  private:
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

SequenceHeader read_header(ByteCursor& in);

// Frame payload framing: u32le total byte count, then per tile a u32le byte
// count followed by that tile's byte-aligned payload.
void write_frame_payload(std::vector<uint8_t>& out,
                         const std::vector<std::vector<uint8_t>>& tile_payloads);
std::vector<std::vector<uint8_t>> read_frame_payload(ByteCursor& in);

void append_u32le(std::vector<uint8_t>& out, uint32_t v);

}  // namespace mvsc
