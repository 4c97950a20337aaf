#include "mvsc/frame.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mvsc/kernels.hpp"

namespace mvsc {

Frame::Frame(int width, int height, uint8_t fill_y, uint8_t fill_c)
    : y(width, height, fill_y),
      u(width / 2, height / 2, fill_c),
      v(width / 2, height / 2, fill_c) {
    if (width < 0 || height < 0 || width % 2 || height % 2)
        throw std::invalid_argument("frame dimensions must be even and non-negative");
}

Sequence read_yuv420(std::istream& in, int width, int height, int max_frames) {
    if (width <= 0 || height <= 0 || width % 2 || height % 2)
        throw std::invalid_argument("yuv420 dimensions must be positive and even");
    Sequence seq;
    const size_t luma = size_t(width) * height;
    const size_t chroma = luma / 4;
    while (max_frames < 0 || int(seq.frames.size()) < max_frames) {
        Frame f(width, height);
        in.read(reinterpret_cast<char*>(f.y.samples.data()), luma);
        size_t got = size_t(in.gcount());
        if (got == 0 && in.eof()) break;
        if (got < luma) throw std::runtime_error("truncated frame in yuv420 stream");
        in.read(reinterpret_cast<char*>(f.u.samples.data()), chroma);
        if (size_t(in.gcount()) < chroma) throw std::runtime_error("truncated frame in yuv420 stream");
        in.read(reinterpret_cast<char*>(f.v.samples.data()), chroma);
        if (size_t(in.gcount()) < chroma) throw std::runtime_error("truncated frame in yuv420 stream");
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

size_t write_yuv420(const Sequence& seq, std::ostream& out) {
    size_t bytes = 0;
    for (const Frame& f : seq.frames) {
        out.write(reinterpret_cast<const char*>(f.y.samples.data()), f.y.samples.size());
        out.write(reinterpret_cast<const char*>(f.u.samples.data()), f.u.samples.size());
        out.write(reinterpret_cast<const char*>(f.v.samples.data()), f.v.samples.size());
        bytes += f.y.samples.size() + f.u.samples.size() + f.v.samples.size();
    }
    if (!out) throw std::runtime_error("yuv420 write failed");
    return bytes;
}

Sequence read_yuv420_file(const std::string& path, int width, int height, int max_frames) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_yuv420(in, width, height, max_frames);
}

void write_yuv420_file(const Sequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_yuv420(seq, out);
}

Plane pad_plane_replicate(const Plane& p, int new_w, int new_h) {
    if (new_w < p.width || new_h < p.height)
        throw std::invalid_argument("pad target smaller than plane");
    Plane out(new_w, new_h);
    for (int y = 0; y < new_h; ++y) {
        const uint8_t* src = p.row(std::min(y, p.height - 1));
        uint8_t* dst = out.row(y);
        for (int x = 0; x < new_w; ++x) dst[x] = src[std::min(x, p.width - 1)];
    }
    return out;
}

Frame pad_replicate(const Frame& f, int multiple) {
    if (multiple < 1 || multiple % 2)
        throw std::invalid_argument("pad multiple must be even and >= 1");
    auto round_up = [](int v, int m) { return (v + m - 1) / m * m; };
    int w = round_up(f.width(), multiple);
    int h = round_up(f.height(), multiple);
    Frame out;
    out.y = pad_plane_replicate(f.y, w, h);
    out.u = pad_plane_replicate(f.u, w / 2, h / 2);
    out.v = pad_plane_replicate(f.v, w / 2, h / 2);
    return out;
}

PsnrValue psnr(const Plane& reference, const Plane& test) {
    if (!reference.same_size(test)) throw std::invalid_argument("psnr: dimension mismatch");
    uint64_t ssd = kernels::active().ssd_u8(reference.samples.data(), reference.width,
                                            test.samples.data(), test.width,
                                            reference.width, reference.height);
    if (ssd == 0) return {true, 0.0};
    double mse = double(ssd) / (double(reference.width) * reference.height);
    return {false, 10.0 * std::log10(255.0 * 255.0 / mse)};
}

}  // namespace mvsc
