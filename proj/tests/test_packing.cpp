#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvsc/packing.hpp"
#include "test_util.hpp"

using namespace mvsc;

TEST_CASE("view packing order follows middle-leftmost-rightmost") {
    CHECK(view_packing_order(3).permutation == std::vector<int>{1, 0, 2});
    CHECK(view_packing_order(1).permutation == std::vector<int>{0});
    CHECK(view_packing_order(2).permutation == std::vector<int>{0, 1});
    CHECK(view_packing_order(5).permutation == std::vector<int>{2, 1, 3, 0, 4});
    CHECK(view_packing_order(8).permutation == std::vector<int>{3, 2, 4, 1, 5, 0, 6, 7});
    CHECK_THROWS_AS(view_packing_order(0), std::invalid_argument);
    CHECK_THROWS_AS(view_packing_order(9), std::invalid_argument);
}

TEST_CASE("pack places constant views per the order") {
    std::vector<Frame> views;
    for (uint8_t v : {10, 20, 30}) views.emplace_back(16, 16, v, v);
    auto [packed, layout] = pack(views, view_packing_order(3));
    CHECK(layout.n_tiles == 3);
    CHECK(layout.tile_width == 16);
    CHECK(packed.width() == 48);
    // cameras L/C/R valued 10/20/30 -> tiles hold 20, 10, 30
    CHECK(packed.y.at(0, 0) == 20);
    CHECK(packed.y.at(16, 0) == 10);
    CHECK(packed.y.at(32, 0) == 30);
    CHECK(packed.u.at(0, 0) == 20);
    CHECK(packed.u.at(8, 0) == 10);
}

TEST_CASE("identical views pack to byte-identical tiles") {
    Frame f = test::random_frame(16, 32);
    std::vector<Frame> views{f, f, f};
    auto [packed, layout] = pack(views, view_packing_order(3));
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 16; ++x) {
            CHECK(packed.y.at(x, y) == packed.y.at(x + 16, y));
            CHECK(packed.y.at(x, y) == packed.y.at(x + 32, y));
        }
}

TEST_CASE("unpack inverts pack for 1, 2 and 3 views") {
    for (int n : {1, 2, 3}) {
        std::vector<Frame> views;
        for (int k = 0; k < n; ++k) views.push_back(test::random_frame(32, 16));
        ViewOrder order = view_packing_order(n);
        auto [packed, layout] = pack(views, order);
        std::vector<Frame> back = unpack(packed, layout, order);
        REQUIRE(int(back.size()) == n);
        for (int k = 0; k < n; ++k) CHECK(back[size_t(k)] == views[size_t(k)]);
    }
}

TEST_CASE("pack validates inputs") {
    std::vector<Frame> bad{Frame(16, 16), Frame(32, 16), Frame(16, 16)};
    CHECK_THROWS_AS(pack(bad, view_packing_order(3)), std::invalid_argument);
    std::vector<Frame> unaligned{Frame(18, 16)};
    CHECK_THROWS_AS(pack(unaligned, view_packing_order(1)), std::invalid_argument);
}

TEST_CASE("unpack validates the layout") {
    Frame f(32, 16);
    CHECK_THROWS_AS(unpack(f, PackedLayout{3, 16, 16}, view_packing_order(3)),
                    std::invalid_argument);
}
