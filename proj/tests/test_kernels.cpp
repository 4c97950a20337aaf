#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "mvsc/kernels.hpp"
#include "mvsc/prediction.hpp"
#include "test_util.hpp"

using namespace mvsc;
using mvsc::test::rnd_int;
using mvsc::test::rng;

namespace {

std::vector<uint8_t> random_bytes(size_t n) {
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = uint8_t(rng()());
    return v;
}

std::vector<int16_t> random_i16(size_t n, int lo, int hi) {
    std::vector<int16_t> v(n);
    for (auto& b : v) b = int16_t(rnd_int(lo, hi));
    return v;
}

}  // namespace

TEST_CASE("ssd matches naive sum over random strided blocks") {
    const auto& k = kernels::scalar();
    for (int trial = 0; trial < 50; ++trial) {
        int w = rnd_int(1, 40), h = rnd_int(1, 20);
        ptrdiff_t sa = w + rnd_int(0, 9), sb = w + rnd_int(0, 9);
        auto a = random_bytes(size_t(sa) * h + 16);
        auto b = random_bytes(size_t(sb) * h + 16);
        uint64_t want = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int d = int(a[size_t(y * sa + x)]) - int(b[size_t(y * sb + x)]);
                want += uint64_t(d * d);
            }
        CHECK(k.ssd_u8(a.data(), sa, b.data(), sb, w, h) == want);
    }
}

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
    const kernels::Funcs* simd = kernels::avx2();
    if (!simd) return;  // non-x86 or cpu without avx2
    const auto& ref = kernels::scalar();

    for (int trial = 0; trial < 200; ++trial) {
        int w = rnd_int(1, 33), h = rnd_int(1, 18);
        ptrdiff_t ss = w + 7 + rnd_int(0, 5);
        auto src = random_bytes(size_t(ss) * (h + 8) + 8);
        const int16_t* taps = luma_taps(rnd_int(1, 3));

        uint64_t s1 = ref.ssd_u8(src.data(), ss, src.data() + 3, ss, w, h);
        uint64_t s2 = simd->ssd_u8(src.data(), ss, src.data() + 3, ss, w, h);
        CHECK(s1 == s2);

        std::vector<uint8_t> d1(size_t(w) * h, 0), d2(size_t(w) * h, 1);
        ref.filter_h_u8(src.data(), ss, d1.data(), w, w, h, taps);
        simd->filter_h_u8(src.data(), ss, d2.data(), w, w, h, taps);
        CHECK(d1 == d2);

        ref.filter_v_u8(src.data(), ss, d1.data(), w, w, h, taps);
        simd->filter_v_u8(src.data(), ss, d2.data(), w, w, h, taps);
        CHECK(d1 == d2);

        std::vector<int16_t> t1(size_t(w) * h, 0), t2(size_t(w) * h, 1);
        ref.filter_h_i16(src.data(), ss, t1.data(), w, w, h, taps);
        simd->filter_h_i16(src.data(), ss, t2.data(), w, w, h, taps);
        CHECK(t1 == t2);

        // vertical pass input range as produced by the horizontal pass
        auto mid = random_i16(size_t(w) * (h + 8), -6120, 22440);
        ref.filter_v_i16_u8(mid.data(), w, d1.data(), w, w, h, taps);
        simd->filter_v_i16_u8(mid.data(), w, d2.data(), w, w, h, taps);
        CHECK(d1 == d2);
    }
}

TEST_CASE("dispatch reports a valid table") {
    CHECK(kernels::active().ssd_u8 != nullptr);
    CHECK((std::string(kernels::active_name()) == "scalar" ||
           std::string(kernels::active_name()) == "avx2"));
    kernels::force_scalar(true);
    CHECK(std::string(kernels::active_name()) == "scalar");
    kernels::force_scalar(false);
}
