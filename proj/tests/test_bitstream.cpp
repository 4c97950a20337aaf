#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvsc/bitstream.hpp"
#include "test_util.hpp"

using namespace mvsc;
using mvsc::test::rnd_int;

namespace {

std::string code_of_ue(uint32_t v) {
    BitWriter bw;
    bw.ue(v);
    size_t n = bw.bit_count();
    auto bytes = bw.take();
    std::string s;
    for (size_t i = 0; i < n; ++i) s += char('0' + ((bytes[i / 8] >> (7 - i % 8)) & 1));
    return s;
}

std::string code_of_se(int32_t v) {
    BitWriter bw;
    bw.se(v);
    size_t n = bw.bit_count();
    auto bytes = bw.take();
    std::string s;
    for (size_t i = 0; i < n; ++i) s += char('0' + ((bytes[i / 8] >> (7 - i % 8)) & 1));
    return s;
}

SequenceHeader sample_header() {
    SequenceHeader h;
    h.view_width = 320;
    h.view_height = 192;
    h.n_views = 3;
    h.view_order = {1, 0, 2};
    h.coding_mode = CodingMode::AsccTiles;
    h.base_qp = 32;
    h.delta_qp = {0, 3, 3};
    h.quarter_pel_ibc = true;
    h.per_tile_filtering = true;
    h.border_extension = true;
    h.deblock_enabled = true;
    h.sao_enabled = true;
    h.gop = GopKind::Ippp;
    h.intra_period = 8;
    h.frame_count = 12;
    return h;
}

}  // namespace

TEST_CASE("exp-golomb codewords") {
    CHECK(code_of_ue(0) == "1");
    CHECK(code_of_ue(1) == "010");
    CHECK(code_of_ue(6) == "00111");
    CHECK(code_of_se(0) == "1");
    CHECK(code_of_se(1) == "010");
    CHECK(code_of_se(-1) == "011");
}

TEST_CASE("ue code length formula") {
    for (uint32_t v : {0u, 1u, 2u, 3u, 6u, 7u, 63u, 64u, 100000u}) {
        BitWriter bw;
        bw.ue(v);
        CHECK(bw.bit_count() == size_t(ue_length(v)));
        int want = 1;
        uint32_t n = v + 1;
        while (n >>= 1) want += 2;
        CHECK(ue_length(v) == want);
    }
}

TEST_CASE("ue/se round-trip on random values") {
    BitWriter bw;
    std::vector<uint32_t> us;
    std::vector<int32_t> ss;
    for (int i = 0; i < 500; ++i) {
        uint32_t u = uint32_t(rnd_int(0, 1 << 20));
        int32_t s = rnd_int(-(1 << 19), 1 << 19);
        us.push_back(u);
        ss.push_back(s);
        bw.ue(u);
        bw.se(s);
        CHECK(se_length(s) > 0);
    }
    auto bytes = bw.take();
    BitReader br(bytes);
    for (int i = 0; i < 500; ++i) {
        CHECK(br.ue() == us[size_t(i)]);
        CHECK(br.se() == ss[size_t(i)]);
    }
}

TEST_CASE("reader detects truncation") {
    std::vector<uint8_t> empty;
    BitReader br(empty);
    CHECK_THROWS_AS(br.ue(), BitstreamError);
    std::vector<uint8_t> zeros{0x00};  // runs out of bits inside the prefix
    BitReader br2(zeros);
    CHECK_THROWS_AS(br2.ue(), BitstreamError);
}

TEST_CASE("header round-trips field for field") {
    SequenceHeader h = sample_header();
    auto bytes = write_header(h);
    ByteCursor cur(bytes);
    SequenceHeader r = read_header(cur);
    CHECK(r == h);
    CHECK(cur.at_end());
    CHECK(r.tile_qp(0) == 32);
    CHECK(r.tile_qp(1) == 35);
    CHECK(r.tile_qp(2) == 35);
}

TEST_CASE("single-view simulcast header has no multiview fields") {
    SequenceHeader h;
    h.view_width = 96;
    h.view_height = 64;
    h.n_views = 1;
    h.view_order = {0};
    h.delta_qp = {0};
    h.coding_mode = CodingMode::Simulcast;
    h.base_qp = 30;
    h.frame_count = 4;
    auto bytes = write_header(h);
    SequenceHeader h2 = h;
    h2.base_qp = 31;  // different content must change the encoding
    CHECK(write_header(h2) != bytes);
    ByteCursor cur(bytes);
    CHECK(read_header(cur) == h);
}

TEST_CASE("header error paths") {
    SequenceHeader h = sample_header();
    auto bytes = write_header(h);

    auto corrupted = bytes;
    corrupted[0] = 'X';
    ByteCursor c1(corrupted);
    CHECK_THROWS_WITH_AS(read_header(c1), doctest::Contains("not an MVSC stream"), BitstreamError);

    auto vbad = bytes;
    vbad[4] = 99;
    ByteCursor c2(vbad);
    CHECK_THROWS_WITH_AS(read_header(c2), doctest::Contains("version"), BitstreamError);

    SequenceHeader perm = h;
    perm.view_order = {1, 1, 2};
    CHECK_THROWS_AS(write_header(perm), BitstreamError);

    SequenceHeader qp = h;
    qp.delta_qp = {0, 40, 0};  // 32+40 > 51
    CHECK_THROWS_AS(write_header(qp), BitstreamError);

    SequenceHeader dq = h;
    dq.coding_mode = CodingMode::SccRaster;  // nonzero deltas need ascc
    CHECK_THROWS_AS(write_header(dq), BitstreamError);
}

TEST_CASE("frame payload framing round-trips and accounts bytes") {
    std::vector<std::vector<uint8_t>> tiles;
    size_t payload_bytes = 0;
    for (int t = 0; t < 3; ++t) {
        std::vector<uint8_t> pl(size_t(rnd_int(0, 40)));
        for (auto& b : pl) b = uint8_t(test::rng()());
        payload_bytes += 4 + pl.size();
        tiles.push_back(std::move(pl));
    }
    std::vector<uint8_t> out;
    write_frame_payload(out, tiles);
    CHECK(out.size() == 4 + payload_bytes);

    ByteCursor cur(out);
    auto back = read_frame_payload(cur);
    CHECK(back == tiles);
    CHECK(cur.at_end());
}

TEST_CASE("empty frame payload still length-framed") {
    std::vector<uint8_t> out;
    write_frame_payload(out, {{}});
    CHECK(out.size() == 8);  // frame length + one empty tile length
    ByteCursor cur(out);
    auto back = read_frame_payload(cur);
    REQUIRE(back.size() == 1);
    CHECK(back[0].empty());
}

TEST_CASE("payload truncation and length mismatch are errors") {
    std::vector<uint8_t> out;
    write_frame_payload(out, {{1, 2, 3}});
    auto cut = out;
    cut.resize(cut.size() - 1);
    ByteCursor c1(cut);
    CHECK_THROWS_AS(read_frame_payload(c1), BitstreamError);

    auto bad = out;
    bad[4] = 200;  // inner tile length overruns the frame
    ByteCursor c2(bad);
    CHECK_THROWS_AS(read_frame_payload(c2), BitstreamError);
}
