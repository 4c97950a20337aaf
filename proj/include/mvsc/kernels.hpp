#pragma once

#include <cstddef>
#include <cstdint>

namespace mvsc::kernels {

// Pixel kernels used by the search, interpolation and metric paths. Every
// entry has a scalar reference implementation; SIMD variants are selected
// once at startup and must be bit-identical to the reference.
//
// Filter convention: dst[i] = sum_t taps[t] * src[i + t], i.e. the caller
// pre-offsets src by -3 samples (rows for the vertical passes). The u8
// outputs apply +32 >> 6 rounding and clamp to [0,255]; filter_h_i16 keeps
// the unshifted 16-bit intermediate for a following filter_v_i16_u8 pass,
// which applies +2048 >> 12.
struct Funcs {
    uint64_t (*ssd_u8)(const uint8_t* a, ptrdiff_t stride_a,
                       const uint8_t* b, ptrdiff_t stride_b, int w, int h);
    void (*filter_h_u8)(const uint8_t* src, ptrdiff_t src_stride,
                        uint8_t* dst, ptrdiff_t dst_stride,
                        int w, int h, const int16_t* taps);
    void (*filter_v_u8)(const uint8_t* src, ptrdiff_t src_stride,
                        uint8_t* dst, ptrdiff_t dst_stride,
                        int w, int h, const int16_t* taps);
    void (*filter_h_i16)(const uint8_t* src, ptrdiff_t src_stride,
                         int16_t* dst, ptrdiff_t dst_stride,
                         int w, int h, const int16_t* taps);
    void (*filter_v_i16_u8)(const int16_t* src, ptrdiff_t src_stride,
                            uint8_t* dst, ptrdiff_t dst_stride,
                            int w, int h, const int16_t* taps);
};

const Funcs& scalar();

// AVX2 variants, or nullptr when not compiled in / not supported by the CPU.
const Funcs* avx2();

// Dispatched table. Honors MVSC_NO_SIMD=1 in the environment.
const Funcs& active();
const char* active_name();

// Test hook: temporarily pin the active table to the scalar reference.
void force_scalar(bool on);

}  // namespace mvsc::kernels
