#include <gtest/gtest.h>

#include <random>

#include "morphoseg/morpho_filters.hpp"
#include "oracles.hpp"
#include "partition_checks.hpp"

using namespace morphoseg;

namespace {

GrayImage row(std::vector<std::uint8_t> v) {
    const auto n = v.size();
    return GrayImage(n, 1, std::move(v));
}

constexpr auto kFour = Connectivity::four;

} // namespace

TEST(Reconstruction, IdentityWhenMarkerEqualsMask) {
    const auto img = row({4, 1, 7, 7, 0});
    EXPECT_EQ(reconstruct_by_erosion(img, img, kFour), img);
}

TEST(Reconstruction, ThreePixelExample) {
    const auto mask = row({0, 2, 0});
    const auto marker = row({1, 3, 1});
    const auto expected = row({1, 2, 1});
    EXPECT_EQ(oracle::reconstruct_fixed_point(marker, mask, kFour), expected);
    EXPECT_EQ(reconstruct_by_erosion(marker, mask, kFour), expected);
}

TEST(Reconstruction, ConstantMaskKeepsMarker) {
    const GrayImage mask(5, 4, 10), marker(5, 4, 13);
    EXPECT_EQ(reconstruct_by_erosion(marker, mask, kFour), marker);
}

TEST(Reconstruction, Preconditions) {
    EXPECT_THROW(reconstruct_by_erosion(row({1, 1}), row({1, 1, 1}), kFour), precondition_error);
    EXPECT_THROW(reconstruct_by_erosion(row({0, 1}), row({1, 1}), kFour), precondition_error);
}

TEST(HMinima, ZeroIsIdentity) {
    const auto img = row({9, 3, 200, 0});
    EXPECT_EQ(h_minima(img, 0, kFour), img);
}

TEST(HMinima, Examples) {
    const auto a = row({0, 3, 1, 3, 0});
    EXPECT_EQ(oracle::h_minima(a, 2, kFour), row({2, 3, 3, 3, 2}));
    EXPECT_EQ(h_minima(a, 2, kFour), row({2, 3, 3, 3, 2}));
    EXPECT_EQ(h_minima(row({0, 2, 0}), 1, kFour), row({1, 2, 1}));
}

TEST(HMinima, SaturatesAt255) {
    const auto img = row({250, 255, 240});
    const auto out = h_minima(img, 20, kFour);
    EXPECT_EQ(out, oracle::h_minima(img, 20, kFour));
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_GE(out[i], img[i]);
}

TEST(AreaClosing, SmallLambdaIsIdentity) {
    const auto img = row({5, 0, 3, 3, 9});
    EXPECT_EQ(area_closing(img, 0, kFour), img);
    EXPECT_EQ(area_closing(img, 1, kFour), img);
}

TEST(AreaClosing, FillsSmallPit) {
    const auto img = row({0, 0, 5, 1, 5, 0, 0});
    const auto expected = row({0, 0, 5, 5, 5, 0, 0});
    EXPECT_EQ(oracle::area_closing(img, 2, kFour), expected);
    EXPECT_EQ(area_closing(img, 2, kFour), expected);
}

TEST(AreaClosing, ConstantUnchanged) {
    const GrayImage img(6, 6, 17);
    for (unsigned l : {0u, 2u, 36u, 1000u}) EXPECT_EQ(area_closing(img, l, kFour), img);
}

TEST(AreaClosing, LambdaLargerThanImageFloodsToMaximum) {
    const auto img = row({3, 1, 4, 1, 5});
    EXPECT_EQ(area_closing(img, 100, kFour), GrayImage(5, 1, 5));
}

TEST(DilateSquare, RadiusZeroIsIdentity) {
    BinaryImage img(4, 3, 0);
    img(1, 1) = 1;
    EXPECT_EQ(dilate_square(img, 0), img);
}

TEST(DilateSquare, SinglePixelBecomesBlock) {
    BinaryImage img(5, 5, 0);
    img(2, 2) = 1;
    const auto out = dilate_square(img, 1);
    for (std::size_t y = 0; y < 5; ++y)
        for (std::size_t x = 0; x < 5; ++x)
            EXPECT_EQ(out(x, y), (x >= 1 && x <= 3 && y >= 1 && y <= 3) ? 1 : 0) << x << "," << y;
}

TEST(DilateSquare, OverlapOfTwoBlocks) {
    BinaryImage a(7, 5, 0), b(7, 5, 0), both(7, 5, 0);
    a(2, 2) = 1;
    b(4, 2) = 1;
    both(2, 2) = both(4, 2) = 1;
    const auto da = dilate_square(a, 1), db = dilate_square(b, 1);
    std::size_t overlap = 0;
    for (std::size_t i = 0; i < da.size(); ++i) overlap += da[i] && db[i];
    EXPECT_EQ(overlap, 3u); // column x=3, rows 1..3
    EXPECT_EQ(dilate_square(both, 1), oracle::dilate(both, 1));
}

TEST(DilateSquare, MatchesDefinitionOnRandomMasks) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t w = 1 + rng() % 20, h = 1 + rng() % 20;
        BinaryImage img(w, h, 0);
        for (auto& v : img) v = rng() % 9 == 0;
        const unsigned r = rng() % 4;
        ASSERT_EQ(dilate_square(img, r), oracle::dilate(img, r));
    }
}

TEST(FilterEpm, ZeroParamsIsIdentity) {
    const auto img = row({3, 9, 0, 4});
    EXPECT_EQ(filter_epm(img, {0, 0}, kFour), img);
}

TEST(FilterEpm, ComposesAreaThenDynamic) {
    const auto img = row({0, 0, 5, 1, 5, 0, 0});
    const auto expected = row({1, 1, 5, 5, 5, 1, 1});
    EXPECT_EQ(oracle::h_minima(oracle::area_closing(img, 2, kFour), 1, kFour), expected);
    EXPECT_EQ(filter_epm(img, {1, 2}, kFour), expected);
}

TEST(FilterEpm, OrderFlagSwapsComposition) {
    std::mt19937 rng(8);
    const auto img = oracle::random_gray(rng, 9, 9, 12);
    EXPECT_EQ(filter_epm(img, {2, 5}, kFour, FilterOrder::dynamic_then_area),
              area_closing(h_minima(img, 2, kFour), 5, kFour));
}

TEST(FilterEpm, ParamsAReduceMinimaOnSyntheticTile) {
    std::mt19937 rng(99);
    const auto tile = oracle::synthetic_epm(rng, 120, 120, 16);
    EXPECT_LT(checks::count_minima(filter_epm(tile, {3, 250}, kFour), kFour),
              checks::count_minima(tile, kFour));
}

// Random small images against the brute-force oracles, both connectivities.
TEST(FilterProperty, MatchesOraclesOnSmallImages) {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 1500; ++trial) {
        const std::size_t w = 1 + rng() % 8, h = 1 + rng() % 8;
        const auto img = oracle::random_gray(rng, w, h, 7);
        const auto conn = trial % 2 ? Connectivity::eight : kFour;
        const unsigned lambda = rng() % 12, hval = rng() % 5;
        ASSERT_EQ(area_closing(img, lambda, conn), oracle::area_closing(img, lambda, conn)) << trial;
        ASSERT_EQ(h_minima(img, hval, conn), oracle::h_minima(img, hval, conn)) << trial;
    }
}

TEST(FilterProperty, ExtensiveBoundedIdempotentAndMinimaNonIncreasing) {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const auto img = oracle::random_gray(rng, 1 + rng() % 24, 1 + rng() % 24, trial % 3 ? 20 : 255);
        const unsigned lambda = rng() % 40, hval = rng() % 30;
        const auto closed = area_closing(img, lambda, kFour);
        const auto hmin = h_minima(img, hval, kFour);
        const auto both = filter_epm(img, {hval, lambda}, kFour);
        for (std::size_t i = 0; i < img.size(); ++i) {
            ASSERT_GE(closed[i], img[i]);
            ASSERT_GE(hmin[i], img[i]);
            ASSERT_GE(both[i], img[i]);
            ASSERT_LE(hmin[i], std::min(255u, img[i] + hval));
        }
        ASSERT_EQ(area_closing(closed, lambda, kFour), closed);
        const auto m = checks::count_minima(img, kFour);
        ASSERT_LE(checks::count_minima(closed, kFour), m);
        ASSERT_LE(checks::count_minima(hmin, kFour), m);
    }
}
