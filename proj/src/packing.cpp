#include "mvsc/packing.hpp"

#include <cstring>
#include <stdexcept>

namespace mvsc {

bool ViewOrder::valid() const {
    int n = n_views();
    std::vector<bool> seen(n, false);
    for (int v : permutation) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return n > 0;
}

std::vector<int> ViewOrder::inverse() const {
    std::vector<int> inv(permutation.size());
    for (int k = 0; k < n_views(); ++k) inv[permutation[k]] = k;
    return inv;
}

ViewOrder view_packing_order(int n_views) {
    if (n_views < 1 || n_views > 8)
        throw std::invalid_argument("view count must be in [1, 8]");
    ViewOrder order;
    int center = (n_views - 1) / 2;
    order.permutation.push_back(center);
    for (int d = 1; d < n_views; ++d) {
        if (center - d >= 0) order.permutation.push_back(center - d);
        if (center + d < n_views) order.permutation.push_back(center + d);
    }
    return order;
}

namespace {

void copy_tile(Plane& dst, int dst_x0, const Plane& src, int src_x0, int w, int h) {
    for (int y = 0; y < h; ++y)
        std::memcpy(dst.row(y) + dst_x0, src.row(y) + src_x0, size_t(w));
}

}  // namespace

std::pair<Frame, PackedLayout> pack(const std::vector<Frame>& views, const ViewOrder& order) {
    if (views.empty() || int(views.size()) != order.n_views() || !order.valid())
        throw std::invalid_argument("pack: view list and order must agree");
    const int w = views[0].width(), h = views[0].height();
    for (const Frame& f : views)
        if (f.width() != w || f.height() != h)
            throw std::invalid_argument("pack: views must share dimensions");
    if (w % 16 || h % 16)
        throw std::invalid_argument("pack: view dimensions must be multiples of 16 (pad first)");

    const int n = order.n_views();
    Frame packed(n * w, h);
    for (int k = 0; k < n; ++k) {
        const Frame& src = views[order.permutation[k]];
        copy_tile(packed.y, k * w, src.y, 0, w, h);
        copy_tile(packed.u, k * w / 2, src.u, 0, w / 2, h / 2);
        copy_tile(packed.v, k * w / 2, src.v, 0, w / 2, h / 2);
    }
    return {std::move(packed), PackedLayout{n, w, h}};
}

std::vector<Frame> unpack(const Frame& packed, const PackedLayout& layout, const ViewOrder& order) {
    if (layout.n_tiles != order.n_views() || !order.valid())
        throw std::invalid_argument("unpack: layout and order must agree");
    if (packed.width() != layout.frame_width() || packed.height() != layout.frame_height)
        throw std::invalid_argument("unpack: frame does not match layout");

    const int w = layout.tile_width, h = layout.frame_height;
    std::vector<Frame> views(layout.n_tiles, Frame(w, h));
    for (int k = 0; k < layout.n_tiles; ++k) {
        Frame& dst = views[order.permutation[k]];
        copy_tile(dst.y, 0, packed.y, k * w, w, h);
        copy_tile(dst.u, 0, packed.u, k * w / 2, w / 2, h / 2);
        copy_tile(dst.v, 0, packed.v, k * w / 2, w / 2, h / 2);
    }
    return views;
}

}  // namespace mvsc
