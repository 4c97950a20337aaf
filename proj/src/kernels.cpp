#include "mvsc/kernels.hpp"

#include <algorithm>
#include <cstdlib>

namespace mvsc::kernels {

namespace {

uint64_t ssd_u8_c(const uint8_t* a, ptrdiff_t sa, const uint8_t* b, ptrdiff_t sb,
                  int w, int h) {
    uint64_t acc = 0;
    for (int y = 0; y < h; ++y) {
        const uint8_t* pa = a + y * sa;
        const uint8_t* pb = b + y * sb;
        for (int x = 0; x < w; ++x) {
            int d = int(pa[x]) - int(pb[x]);
            acc += uint64_t(d * d);
        }
    }
    return acc;
}

inline uint8_t clamp_u8(int v) {
    return uint8_t(std::clamp(v, 0, 255));
}

void filter_h_u8_c(const uint8_t* src, ptrdiff_t ss, uint8_t* dst, ptrdiff_t ds,
                   int w, int h, const int16_t* taps) {
    for (int y = 0; y < h; ++y) {
        const uint8_t* s = src + y * ss;
        uint8_t* d = dst + y * ds;
        for (int x = 0; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 8; ++t) acc += taps[t] * s[x + t];
            d[x] = clamp_u8((acc + 32) >> 6);
        }
    }
}

void filter_v_u8_c(const uint8_t* src, ptrdiff_t ss, uint8_t* dst, ptrdiff_t ds,
                   int w, int h, const int16_t* taps) {
    for (int y = 0; y < h; ++y) {
        const uint8_t* s = src + y * ss;
        uint8_t* d = dst + y * ds;
        for (int x = 0; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 8; ++t) acc += taps[t] * s[x + t * ss];
            d[x] = clamp_u8((acc + 32) >> 6);
        }
    }
}

void filter_h_i16_c(const uint8_t* src, ptrdiff_t ss, int16_t* dst, ptrdiff_t ds,
                    int w, int h, const int16_t* taps) {
    for (int y = 0; y < h; ++y) {
        const uint8_t* s = src + y * ss;
        int16_t* d = dst + y * ds;
        for (int x = 0; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 8; ++t) acc += taps[t] * s[x + t];
            d[x] = int16_t(acc);
        }
    }
}

void filter_v_i16_u8_c(const int16_t* src, ptrdiff_t ss, uint8_t* dst, ptrdiff_t ds,
                       int w, int h, const int16_t* taps) {
    for (int y = 0; y < h; ++y) {
        const int16_t* s = src + y * ss;
        uint8_t* d = dst + y * ds;
        for (int x = 0; x < w; ++x) {
            int32_t acc = 0;
            for (int t = 0; t < 8; ++t) acc += int32_t(taps[t]) * s[x + t * ss];
            d[x] = clamp_u8(int((acc + 2048) >> 12));
        }
    }
}

const Funcs kScalar = {
    ssd_u8_c, filter_h_u8_c, filter_v_u8_c, filter_h_i16_c, filter_v_i16_u8_c,
};

const Funcs* pick_active() {
#if defined(MVSC_AVX2_BUILD)
    const char* no_simd = std::getenv("MVSC_NO_SIMD");
    if (!(no_simd && no_simd[0] == '1') && avx2()) return avx2();
#endif
    return &kScalar;
}

const Funcs* g_active = nullptr;
bool g_forced_scalar = false;

}  // namespace

const Funcs& scalar() { return kScalar; }

#if !defined(MVSC_AVX2_BUILD)
const Funcs* avx2() { return nullptr; }
#endif

const Funcs& active() {
    if (g_forced_scalar) return kScalar;
    if (!g_active) g_active = pick_active();
    return *g_active;
}

const char* active_name() { return &active() == &kScalar ? "scalar" : "avx2"; }

void force_scalar(bool on) { g_forced_scalar = on; }

}  // namespace mvsc::kernels
