#include "mvsc/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

// AVX2 variants. Must match the scalar reference bit-exactly; the scalar
// tail paths below are copies of the reference inner loops.

namespace mvsc::kernels {

namespace {

inline uint8_t clamp_u8(int v) { return uint8_t(std::clamp(v, 0, 255)); }

uint64_t ssd_u8_avx2(const uint8_t* a, ptrdiff_t sa, const uint8_t* b, ptrdiff_t sb,
                     int w, int h) {
    uint64_t acc = 0;
    const int w16 = w & ~15;
    for (int y = 0; y < h; ++y) {
        const uint8_t* pa = a + y * sa;
        const uint8_t* pb = b + y * sb;
        __m256i vacc = _mm256_setzero_si256();
        int x = 0;
        for (; x < w16; x += 16) {
            __m256i va = _mm256_cvtepu8_epi16(_mm_loadu_si128((const __m128i*)(pa + x)));
            __m256i vb = _mm256_cvtepu8_epi16(_mm_loadu_si128((const __m128i*)(pb + x)));
            __m256i d = _mm256_sub_epi16(va, vb);
            vacc = _mm256_add_epi32(vacc, _mm256_madd_epi16(d, d));
        }
        __m128i lo = _mm256_castsi256_si128(vacc);
        __m128i hi = _mm256_extracti128_si256(vacc, 1);
        __m128i s4 = _mm_add_epi32(lo, hi);
        s4 = _mm_add_epi32(s4, _mm_srli_si128(s4, 8));
        s4 = _mm_add_epi32(s4, _mm_srli_si128(s4, 4));
        acc += uint32_t(_mm_cvtsi128_si32(s4));
        for (; x < w; ++x) {
            int d = int(pa[x]) - int(pb[x]);
            acc += uint64_t(d * d);
        }
    }
    return acc;
}

// 8 outputs per iteration; partial sums stay within int16 in tap order for
// all filters with coefficient magnitude sums <= 128.
void filter_h_u8_avx2(const uint8_t* src, ptrdiff_t ss, uint8_t* dst, ptrdiff_t ds,
                      int w, int h, const int16_t* taps) {
    __m128i vt[8];
    for (int t = 0; t < 8; ++t) vt[t] = _mm_set1_epi16(taps[t]);
    const __m128i vround = _mm_set1_epi16(32);
    const int w8 = w & ~7;
    for (int y = 0; y < h; ++y) {
        const uint8_t* s = src + y * ss;
        uint8_t* d = dst + y * ds;
        int x = 0;
        for (; x < w8; x += 8) {
            __m128i acc = _mm_setzero_si128();
            for (int t = 0; t < 8; ++t) {
                __m128i v = _mm_cvtepu8_epi16(_mm_loadl_epi64((const __m128i*)(s + x + t)));
                acc = _mm_add_epi16(acc, _mm_mullo_epi16(v, vt[t]));
            }
            acc = _mm_srai_epi16(_mm_add_epi16(acc, vround), 6);
            _mm_storel_epi64((__m128i*)(d + x), _mm_packus_epi16(acc, acc));
        }
        for (; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 8; ++t) acc += taps[t] * s[x + t];
            d[x] = clamp_u8((acc + 32) >> 6);
        }
    }
}

void filter_v_u8_avx2(const uint8_t* src, ptrdiff_t ss, uint8_t* dst, ptrdiff_t ds,
                      int w, int h, const int16_t* taps) {
    __m128i vt[8];
    for (int t = 0; t < 8; ++t) vt[t] = _mm_set1_epi16(taps[t]);
    const __m128i vround = _mm_set1_epi16(32);
    const int w8 = w & ~7;
    for (int y = 0; y < h; ++y) {
        const uint8_t* s = src + y * ss;
        uint8_t* d = dst + y * ds;
        int x = 0;
        for (; x < w8; x += 8) {
            __m128i acc = _mm_setzero_si128();
            for (int t = 0; t < 8; ++t) {
                __m128i v = _mm_cvtepu8_epi16(_mm_loadl_epi64((const __m128i*)(s + x + t * ss)));
                acc = _mm_add_epi16(acc, _mm_mullo_epi16(v, vt[t]));
            }
            acc = _mm_srai_epi16(_mm_add_epi16(acc, vround), 6);
            _mm_storel_epi64((__m128i*)(d + x), _mm_packus_epi16(acc, acc));
        }
        for (; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 8; ++t) acc += taps[t] * s[x + t * ss];
            d[x] = clamp_u8((acc + 32) >> 6);
        }
    }
}

void filter_h_i16_avx2(const uint8_t* src, ptrdiff_t ss, int16_t* dst, ptrdiff_t ds,
                       int w, int h, const int16_t* taps) {
    __m128i vt[8];
    for (int t = 0; t < 8; ++t) vt[t] = _mm_set1_epi16(taps[t]);
    const int w8 = w & ~7;
    for (int y = 0; y < h; ++y) {
        const uint8_t* s = src + y * ss;
        int16_t* d = dst + y * ds;
        int x = 0;
        for (; x < w8; x += 8) {
            __m128i acc = _mm_setzero_si128();
            for (int t = 0; t < 8; ++t) {
                __m128i v = _mm_cvtepu8_epi16(_mm_loadl_epi64((const __m128i*)(s + x + t)));
                acc = _mm_add_epi16(acc, _mm_mullo_epi16(v, vt[t]));
            }
            _mm_storeu_si128((__m128i*)(d + x), acc);
        }
        for (; x < w; ++x) {
            int acc = 0;
            for (int t = 0; t < 8; ++t) acc += taps[t] * s[x + t];
            d[x] = int16_t(acc);
        }
    }
}

void filter_v_i16_u8_avx2(const int16_t* src, ptrdiff_t ss, uint8_t* dst, ptrdiff_t ds,
                          int w, int h, const int16_t* taps) {
    __m256i vt[8];
    for (int t = 0; t < 8; ++t) vt[t] = _mm256_set1_epi32(taps[t]);
    const __m256i vround = _mm256_set1_epi32(2048);
    const int w8 = w & ~7;
    for (int y = 0; y < h; ++y) {
        const int16_t* s = src + y * ss;
        uint8_t* d = dst + y * ds;
        int x = 0;
        for (; x < w8; x += 8) {
            __m256i acc = _mm256_setzero_si256();
            for (int t = 0; t < 8; ++t) {
                __m256i v = _mm256_cvtepi16_epi32(_mm_loadu_si128((const __m128i*)(s + x + t * ss)));
                acc = _mm256_add_epi32(acc, _mm256_mullo_epi32(v, vt[t]));
            }
            acc = _mm256_srai_epi32(_mm256_add_epi32(acc, vround), 12);
            __m128i p16 = _mm_packs_epi32(_mm256_castsi256_si128(acc),
                                          _mm256_extracti128_si256(acc, 1));
            _mm_storel_epi64((__m128i*)(d + x), _mm_packus_epi16(p16, p16));
        }
        for (; x < w; ++x) {
            int32_t acc = 0;
            for (int t = 0; t < 8; ++t) acc += int32_t(taps[t]) * s[x + t * ss];
            d[x] = clamp_u8(int((acc + 2048) >> 12));
        }
    }
}

const Funcs kAvx2 = {
    ssd_u8_avx2, filter_h_u8_avx2, filter_v_u8_avx2, filter_h_i16_avx2, filter_v_i16_u8_avx2,
};

}  // namespace

const Funcs* avx2() {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

}  // namespace mvsc::kernels
