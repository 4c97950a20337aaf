#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mvsc {

/// 8-bit sample plane, row-major, stride == width.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> samples;

    Plane() = default;
    Plane(int w, int h, uint8_t fill = 0)
        : width(w), height(h), samples(size_t(w) * size_t(h), fill) {}

    uint8_t* row(int y) { return samples.data() + size_t(y) * width; }
    const uint8_t* row(int y) const { return samples.data() + size_t(y) * width; }
    uint8_t at(int x, int y) const { return samples[size_t(y) * width + x]; }
    void set(int x, int y, uint8_t v) { samples[size_t(y) * width + x] = v; }
    bool same_size(const Plane& o) const { return width == o.width && height == o.height; }
    bool operator==(const Plane&) const = default;
};

/// Planar 4:2:0 picture. Luma dimensions must be even.
struct Frame {
    Plane y, u, v;

    Frame() = default;
    Frame(int width, int height, uint8_t fill_y = 0, uint8_t fill_c = 128);

    int width() const { return y.width; }
    int height() const { return y.height; }
    bool operator==(const Frame&) const = default;
};

struct Sequence {
    std::vector<Frame> frames;
    double fps = 25.0;
};

// Raw I420 layout: per frame Y(w*h), U(w/2*h/2), V(w/2*h/2), no headers.
// A trailing partial frame is an error. max_frames < 0 reads to the end.
Sequence read_yuv420(std::istream& in, int width, int height, int max_frames = -1);
size_t write_yuv420(const Sequence& seq, std::ostream& out);
Sequence read_yuv420_file(const std::string& path, int width, int height, int max_frames = -1);
void write_yuv420_file(const Sequence& seq, const std::string& path);

// Grows a frame to the next multiple of `multiple` (luma; chroma follows at
// half), replicating the last row/column. `multiple` must be even and >= 1.
Frame pad_replicate(const Frame& f, int multiple);
Plane pad_plane_replicate(const Plane& p, int new_w, int new_h);

/// PSNR with a distinguished infinity for identical planes (never a fake
/// large number).
struct PsnrValue {
    bool infinite = false;
    double db = 0.0;
};
PsnrValue psnr(const Plane& reference, const Plane& test);

}  // namespace mvsc
