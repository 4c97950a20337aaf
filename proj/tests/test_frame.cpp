#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mvsc/frame.hpp"
#include "test_util.hpp"

using namespace mvsc;

namespace {

std::string to_bytes(const Sequence& s) {
    std::ostringstream os;
    write_yuv420(s, os);
    return os.str();
}

}  // namespace

TEST_CASE("read_yuv420 basic framing") {
    std::string six(6, '\x07');
    std::istringstream in(six);
    Sequence s = read_yuv420(in, 2, 2);
    CHECK(s.frames.size() == 1);
    CHECK(s.frames[0].y.samples.size() == 4);
    CHECK(s.frames[0].u.samples.size() == 1);
    CHECK(s.frames[0].v.samples.size() == 1);
}

TEST_CASE("read_yuv420 rejects a truncated trailing frame") {
    std::string five(5, '\x00');
    std::istringstream in(five);
    CHECK_THROWS_WITH_AS(read_yuv420(in, 2, 2), doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("read_yuv420 of an empty stream is an empty sequence") {
    std::istringstream in("");
    CHECK(read_yuv420(in, 2, 2).frames.empty());
}

TEST_CASE("read_yuv420 rejects odd dimensions") {
    std::istringstream in("");
    CHECK_THROWS_AS(read_yuv420(in, 3, 2), std::invalid_argument);
}

TEST_CASE("write_yuv420 byte counts and empty sequence") {
    Sequence s;
    std::ostringstream os;
    CHECK(write_yuv420(s, os) == 0);
    s.frames.emplace_back(2, 2);
    std::ostringstream os2;
    CHECK(write_yuv420(s, os2) == 6);
}

TEST_CASE("write then read is the identity") {
    Sequence s;
    for (int i = 0; i < 3; ++i) s.frames.push_back(test::random_frame(8, 8));
    std::string bytes = to_bytes(s);
    std::istringstream in(bytes);
    Sequence r = read_yuv420(in, 8, 8);
    REQUIRE(r.frames.size() == s.frames.size());
    for (size_t i = 0; i < s.frames.size(); ++i) CHECK(r.frames[i] == s.frames[i]);
    // read respects max_frames
    std::istringstream in2(bytes);
    CHECK(read_yuv420(in2, 8, 8, 2).frames.size() == 2);
}

TEST_CASE("pad_replicate leaves aligned frames unchanged") {
    Frame f = test::random_frame(16, 16);
    CHECK(pad_replicate(f, 16) == f);
}

TEST_CASE("pad_replicate replicates the last column") {
    Frame f(18, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 18; ++x) f.y.set(x, y, uint8_t(x));
    Frame p = pad_replicate(f, 16);
    CHECK(p.width() == 32);
    CHECK(p.height() == 16);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 18; ++x) CHECK(p.y.at(x, y) == x);
        for (int x = 18; x < 32; ++x) CHECK(p.y.at(x, y) == 17);
    }
    CHECK(p.u.width == 16);
}

TEST_CASE("pad_replicate keeps constant frames constant") {
    Frame f(18, 10, 99, 42);
    Frame p = pad_replicate(f, 16);
    for (auto s : p.y.samples) CHECK(s == 99);
    for (auto s : p.u.samples) CHECK(s == 42);
}

TEST_CASE("psnr trivial values") {
    Plane a = test::random_plane(16, 16);
    CHECK(psnr(a, a).infinite);

    Plane b = a;
    for (auto& s : b.samples) s = uint8_t(s < 255 ? s + 1 : s - 1);
    PsnrValue p = psnr(a, b);
    CHECK(!p.infinite);
    CHECK(p.db == doctest::Approx(48.1308).epsilon(1e-4));

    Plane z(16, 16, 0), m(16, 16, 255);
    CHECK(psnr(z, m).db == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("psnr is symmetric and decreases with noise amplitude") {
    Plane a(32, 32, 128);
    double last = 1e9;
    for (int amp : {1, 4, 16, 64}) {
        Plane b = a;
        for (size_t i = 0; i < b.samples.size(); ++i)
            b.samples[i] = uint8_t(128 + (i % 2 ? amp : -amp));
        PsnrValue p1 = psnr(a, b), p2 = psnr(b, a);
        CHECK(p1.db == p2.db);
        CHECK(p1.db < last);
        last = p1.db;
    }
}

TEST_CASE("psnr rejects dimension mismatch") {
    Plane a(16, 16), b(16, 8);
    CHECK_THROWS_AS(psnr(a, b), std::invalid_argument);
}
