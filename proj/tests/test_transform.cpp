#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mvsc/transform.hpp"
#include "test_util.hpp"

using namespace mvsc;
using mvsc::test::rnd_int;

namespace {

ResidualBlock8 random_residual() {
    ResidualBlock8 r{};
    for (auto& v : r) v = int16_t(rnd_int(-255, 255));
    return r;
}

// Float DCT-II basis (the matrix pre-rounding).
double basis(int k, int n) {
    double ck = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
    return 64.0 * ck * std::cos(M_PI * k * (2 * n + 1) / 16.0);
}

}  // namespace

TEST_CASE("transform matrix DC row and float-basis orthogonality") {
    const auto& m = transform_matrix8();
    for (int n = 0; n < 8; ++n) CHECK(m[0][n] == 23);
    // rows of the float basis are mutually orthogonal
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b) {
            double dot = 0;
            for (int n = 0; n < 8; ++n) dot += basis(a, n) * basis(b, n);
            CHECK(std::abs(dot) < 1e-9);
        }
    // memoized: same object back
    CHECK(&transform_matrix8() == &m);
}

TEST_CASE("forward transform of zero and constant blocks") {
    ResidualBlock8 zero{};
    for (int32_t c : forward_transform8(zero)) CHECK(c == 0);

    ResidualBlock8 const8{};
    const8.fill(8);
    CoeffBlock8 c = forward_transform8(const8);
    CHECK(c[0] != 0);
    for (int i = 1; i < 64; ++i) CHECK(c[i] == 0);
}

TEST_CASE("round-trip error is at most one per sample") {
    // structured extremes plus a large random sample
    std::vector<ResidualBlock8> blocks;
    ResidualBlock8 b{};
    b.fill(255);
    blocks.push_back(b);
    b.fill(-255);
    blocks.push_back(b);
    for (int i = 0; i < 64; ++i) b[i] = int16_t(((i / 8 + i % 8) % 2) ? 255 : -255);
    blocks.push_back(b);
    for (int t = 0; t < 3000; ++t) blocks.push_back(random_residual());

    int max_err = 0;
    for (const ResidualBlock8& r : blocks) {
        ResidualBlock8 rt = inverse_transform8(forward_transform8(r));
        for (int i = 0; i < 64; ++i) max_err = std::max(max_err, std::abs(rt[i] - r[i]));
    }
    CHECK(max_err <= 1);
}

TEST_CASE("inverse transform clamps to [-512, 511]") {
    CoeffBlock8 c{};
    c[0] = 1 << 22;  // absurd DC
    ResidualBlock8 r = inverse_transform8(c);
    for (int16_t v : r) {
        CHECK(v >= -512);
        CHECK(v <= 511);
    }
    CHECK(r[0] == 511);
}

TEST_CASE("qstep follows the HEVC spacing") {
    CHECK(qstep(4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(qstep(10) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(qstep(22) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK_THROWS_AS(qstep(-1), std::invalid_argument);
    CHECK_THROWS_AS(qstep(52), std::invalid_argument);
}

TEST_CASE("quantize examples") {
    CoeffBlock8 c{};
    LevelBlock8 l = quantize(c, 30, true);
    for (int32_t v : l) CHECK(v == 0);

    c[0] = 100;
    CHECK(quantize(c, 4, true)[0] == 100);
    CHECK(quantize(c, 22, true)[0] == 12);
    c[0] = -100;
    CHECK(quantize(c, 22, true)[0] == -12);
}

TEST_CASE("dequantize examples") {
    LevelBlock8 l{};
    CHECK(dequantize(l, 30)[0] == 0);
    l[0] = 12;
    CHECK(dequantize(l, 22)[0] == 96);
    l[0] = 3;
    CHECK(dequantize(l, 5)[0] == 3);
    l[0] = -3;
    CHECK(dequantize(l, 5)[0] == -3);
}

TEST_CASE("sum of level magnitudes is non-increasing in qp") {
    for (int trial = 0; trial < 20; ++trial) {
        CoeffBlock8 c = forward_transform8(random_residual());
        int64_t last = -1;
        for (int qp = 0; qp <= 51; ++qp) {
            int64_t sum = 0;
            for (int32_t v : quantize(c, qp, trial % 2)) sum += std::abs(v);
            if (last >= 0) CHECK(sum <= last);
            last = sum;
        }
    }
}

TEST_CASE("near-lossless at qp 4: quantized round trip stays within one") {
    for (int trial = 0; trial < 200; ++trial) {
        ResidualBlock8 r = random_residual();
        LevelBlock8 l = quantize(forward_transform8(r), 4, true);
        ResidualBlock8 rt = inverse_transform8(dequantize(l, 4));
        for (int i = 0; i < 64; ++i) CHECK(std::abs(rt[i] - r[i]) <= 1);
    }
}
