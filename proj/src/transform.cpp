#include "mvsc/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvsc {

namespace {

int round_half_away(double v) {
    return int(v >= 0 ? std::floor(v + 0.5) : std::ceil(v - 0.5));
}

int64_t shift_half_away(int64_t v, int s) {
    const int64_t add = int64_t(1) << (s - 1);
    return v >= 0 ? (v + add) >> s : -((-v + add) >> s);
}

using Mat8 = std::array<std::array<int, 8>, 8>;

Mat8 build_forward() {
    Mat8 m{};
    for (int k = 0; k < 8; ++k) {
        double ck = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
        for (int n = 0; n < 8; ++n)
            m[k][n] = round_half_away(64.0 * ck * std::cos(M_PI * k * (2 * n + 1) / 16.0));
    }
    return m;
}

// Gauss-Jordan inverse of the 8x8 forward matrix, then fixed-point rounding.
Mat8 build_inverse() {
    const Mat8& m = transform_matrix8();
    double a[8][16];
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            a[i][j] = m[i][j];
            a[i][8 + j] = i == j ? 1.0 : 0.0;
        }
    }
    for (int col = 0; col < 8; ++col) {
        int piv = col;
        for (int r = col + 1; r < 8; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        for (int j = 0; j < 16; ++j) std::swap(a[col][j], a[piv][j]);
        double d = a[col][col];
        for (int j = 0; j < 16; ++j) a[col][j] /= d;
        for (int r = 0; r < 8; ++r) {
            if (r == col) continue;
            double f = a[r][col];
            for (int j = 0; j < 16; ++j) a[r][j] -= f * a[col][j];
        }
    }
    Mat8 inv{};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            inv[i][j] = round_half_away(65536.0 * a[i][8 + j]);
    return inv;
}

}  // namespace

const Mat8& transform_matrix8() {
    static const Mat8 m = build_forward();
    return m;
}

const Mat8& inverse_transform_matrix8() {
    static const Mat8 m = build_inverse();
    return m;
}

CoeffBlock8 forward_transform8(const ResidualBlock8& residual) {
    const Mat8& m = transform_matrix8();
    int64_t t1[8][8];
    for (int k = 0; k < 8; ++k)
        for (int j = 0; j < 8; ++j) {
            int64_t acc = 0;
            for (int n = 0; n < 8; ++n) acc += int64_t(m[k][n]) * residual[n * 8 + j];
            t1[k][j] = shift_half_away(acc, 3);
        }
    CoeffBlock8 out{};
    for (int k = 0; k < 8; ++k)
        for (int l = 0; l < 8; ++l) {
            int64_t acc = 0;
            for (int n = 0; n < 8; ++n) acc += t1[k][n] * m[l][n];
            out[k * 8 + l] = int32_t(shift_half_away(acc, 4));
        }
    return out;
}

ResidualBlock8 inverse_transform8(const CoeffBlock8& coeffs) {
    const Mat8& im = inverse_transform_matrix8();
    int64_t t1[8][8];
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            int64_t acc = 0;
            for (int n = 0; n < 8; ++n) acc += int64_t(im[i][n]) * coeffs[n * 8 + j];
            t1[i][j] = shift_half_away(acc, 12);
        }
    ResidualBlock8 out{};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            int64_t acc = 0;
            for (int n = 0; n < 8; ++n) acc += t1[i][n] * im[j][n];
            out[i * 8 + j] = int16_t(std::clamp<int64_t>(shift_half_away(acc, 13), -512, 511));
        }
    return out;
}

int clamp_qp(int qp) { return std::clamp(qp, 0, 51); }

double qstep(int qp) {
    if (qp < 0 || qp > 51) throw std::invalid_argument("qp out of [0, 51]");
    return std::exp2((qp - 4) / 6.0);
}

LevelBlock8 quantize(const CoeffBlock8& coeffs, int qp, bool intra) {
    const double step = qstep(qp);
    const double f = intra ? 1.0 / 3.0 : 1.0 / 6.0;
    LevelBlock8 out{};
    for (int i = 0; i < 64; ++i) {
        int32_t c = coeffs[i];
        int32_t mag = int32_t(std::floor(std::abs(double(c)) / step + f));
        out[i] = c < 0 ? -mag : mag;
    }
    return out;
}

CoeffBlock8 dequantize(const LevelBlock8& levels, int qp) {
    const double step = qstep(qp);
    CoeffBlock8 out{};
    for (int i = 0; i < 64; ++i)
        out[i] = int32_t(std::llround(double(levels[i]) * step));
    return out;
}

}  // namespace mvsc
