#pragma once

#include <array>
#include <cstdint>

namespace mvsc {

using ResidualBlock8 = std::array<int16_t, 64>;  // row-major, range [-255, 255] in, [-512, 511] out
using CoeffBlock8 = std::array<int32_t, 64>;
using LevelBlock8 = std::array<int32_t, 64>;

// Forward 8x8 integer DCT matrix: M[k][n] = round_half_away(64*c_k*cos(pi*k*(2n+1)/16)),
// c_0 = sqrt(1/8), c_k = sqrt(2/8). Constant across calls.
const std::array<std::array<int, 8>, 8>& transform_matrix8();

// Fixed-point inverse of transform_matrix8 (scale 2^16); the forward matrix
// rounding leaves the rows unevenly scaled, so the inverse must use the true
// matrix inverse rather than the transpose to keep the round-trip error
// within one per sample.
const std::array<std::array<int, 8>, 8>& inverse_transform_matrix8();

// Separable M*R*M^T with round-half-away shifts 3 (first pass) and 4 (second).
CoeffBlock8 forward_transform8(const ResidualBlock8& residual);

// Separable IM*C*IM^T with shifts 12 and 13; output clamped to [-512, 511].
ResidualBlock8 inverse_transform8(const CoeffBlock8& coeffs);

// Quantizer step 2^((qp-4)/6); qp in [0, 51].
double qstep(int qp);

// level = sign(c) * floor(|c|/qstep + f), f = 1/3 intra, 1/6 otherwise.
LevelBlock8 quantize(const CoeffBlock8& coeffs, int qp, bool intra);

// c' = round_half_away(level * qstep)
CoeffBlock8 dequantize(const LevelBlock8& levels, int qp);

int clamp_qp(int qp);

}  // namespace mvsc
