#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "support.hpp"
#include "tello_arena/controller.hpp"
#include "tello_arena/vision.hpp"

using namespace tello;
using tello::testing::Rng;

namespace {

bool subset(const Mask& a, const Mask& b)
{
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            if (a.at(x, y) && !b.at(x, y))
                return false;
    return true;
}

/// Union-find count of 8-connected components.
std::size_t oracle_component_count(const Mask& m)
{
    const int w = m.width(), h = m.height();
    std::vector<int> parent(static_cast<std::size_t>(w) * h);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y))
                continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (m.get_or(x + dx, y + dy, false))
                        parent[find(y * w + x)] = find((y + dy) * w + x + dx);
        }
    std::set<int> roots;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (m.at(x, y))
                roots.insert(find(y * w + x));
    return roots.size();
}

Frame solid(int w, int h, Rgb c) { return Frame(w, h, c); }

}  // namespace

TEST(Vision, HsvConversion)
{
    const Hsv red = rgb_to_hsv(255, 0, 0);
    EXPECT_DOUBLE_EQ(red.h, 0);
    EXPECT_DOUBLE_EQ(red.s, 1);
    EXPECT_DOUBLE_EQ(red.v, 1);
    EXPECT_DOUBLE_EQ(rgb_to_hsv(0, 255, 0).h, 120);
    EXPECT_DOUBLE_EQ(rgb_to_hsv(0, 0, 255).h, 240);
    EXPECT_DOUBLE_EQ(rgb_to_hsv(255, 255, 0).h, 60);
    const Hsv grey = rgb_to_hsv(128, 128, 128);
    EXPECT_DOUBLE_EQ(grey.s, 0);
    EXPECT_NEAR(grey.v, 128 / 255.0, 1e-12);
}

TEST(Vision, HueRangeWraps)
{
    EXPECT_TRUE(ranges::kRed.contains(rgb_to_hsv(255, 0, 0)));
    EXPECT_TRUE(ranges::kRed.contains(rgb_to_hsv(255, 0, 40)));  // hue ~351
    EXPECT_TRUE(ranges::kRed.contains(rgb_to_hsv(255, 40, 0)));  // hue ~9
    EXPECT_FALSE(ranges::kRed.contains(rgb_to_hsv(255, 255, 0)));
    EXPECT_TRUE(ranges::kBlack.contains(rgb_to_hsv(0, 0, 0)));
    EXPECT_FALSE(ranges::kBlack.contains(rgb_to_hsv(245, 245, 240)));
}

TEST(Vision, PaintClassifiesToItsColor)
{
    for (MarkerColor c : {MarkerColor::Red, MarkerColor::Blue, MarkerColor::Green, MarkerColor::Yellow}) {
        const ColorClass expected = tello::testing::color_of(c);
        EXPECT_EQ(classify_color(paint_of(c)), expected);
        EXPECT_TRUE(ranges::of(expected).contains(rgb_to_hsv(paint_of(c))));
    }
    EXPECT_EQ(classify_color(paint::kWhite), ColorClass::Other);
    EXPECT_EQ(classify_color(paint::kBlack), ColorClass::Other);
}

TEST(Vision, InRangeParallelMatchesSerial)
{
    Rng rng(1);
    Frame f(97, 61);
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
            f.set(x, y,
                  {static_cast<std::uint8_t>(tello::testing::uniform_int(rng, 0, 255)),
                   static_cast<std::uint8_t>(tello::testing::uniform_int(rng, 0, 255)),
                   static_cast<std::uint8_t>(tello::testing::uniform_int(rng, 0, 255))});
    for (ColorClass c : {ColorClass::Red, ColorClass::Blue, ColorClass::Green, ColorClass::Yellow})
        EXPECT_EQ(in_range(f, ranges::of(c)), reference::in_range(f, ranges::of(c)));
    EXPECT_EQ(in_range(f, ranges::kBlack), reference::in_range(f, ranges::kBlack));
}

TEST(Vision, MorphologyParallelMatchesSerial)
{
    Rng rng(2);
    for (int i = 0; i < 60; ++i) {
        const Mask m = tello::testing::random_mask(rng, tello::testing::uniform_int(rng, 1, 50),
                                                   tello::testing::uniform_int(rng, 1, 50), 0.5);
        const int r = tello::testing::uniform_int(rng, 1, 3);
        for (MorphOp op : {MorphOp::Erode, MorphOp::Dilate, MorphOp::Open, MorphOp::Close})
            ASSERT_EQ(morphology(m, op, r), reference::morphology(m, op, r));
    }
}

TEST(Vision, MorphologyKnownValues)
{
    Mask m(7, 7);
    m.set(3, 3, true);
    const Mask d = morphology(m, MorphOp::Dilate, 1);
    EXPECT_EQ(d.count(), 9u);
    EXPECT_EQ(morphology(d, MorphOp::Erode, 1), m);
    EXPECT_EQ(morphology(m, MorphOp::Open, 1).count(), 0u);
    EXPECT_THROW(morphology(m, MorphOp::Open, 0), std::invalid_argument);

    // Background beyond the border erodes edge pixels.
    EXPECT_EQ(morphology(Mask(5, 5, true), MorphOp::Erode, 1).count(), 9u);
}

TEST(Vision, MorphologyProperties)
{
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Mask m = i % 2 ? tello::testing::random_mask(rng, 40, 30, 0.55) : tello::testing::random_blob_mask(rng, 40, 30);
        const int r = tello::testing::uniform_int(rng, 1, 3);
        const Mask opened = morphology(m, MorphOp::Open, r);
        ASSERT_EQ(morphology(opened, MorphOp::Open, r), opened);
        ASSERT_TRUE(subset(opened, m));
        ASSERT_TRUE(subset(m, morphology(m, MorphOp::Dilate, r)));
        ASSERT_TRUE(subset(morphology(m, MorphOp::Erode, r), m));
        const Mask closed = morphology(m, MorphOp::Close, r);
        ASSERT_EQ(morphology(closed, MorphOp::Close, r), closed);

        // Duality away from the border, where the background padding is symmetric.
        const Mask eroded = morphology(m, MorphOp::Erode, r);
        const Mask dual = morphology(m.complement(), MorphOp::Dilate, r).complement();
        for (int y = r; y < m.height() - r; ++y)
            for (int x = r; x < m.width() - r; ++x)
                ASSERT_EQ(eroded.at(x, y), dual.at(x, y));
    }
}

TEST(Vision, ComponentsPartitionTheMask)
{
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        const Mask m = i % 2 ? tello::testing::random_mask(rng, 37, 23, 0.4) : tello::testing::random_blob_mask(rng, 37, 23);
        const auto regions = connected_components(m);
        std::size_t area = 0;
        Mask seen(m.width(), m.height());
        for (const Region& r : regions) {
            ASSERT_EQ(r.area, r.pixels.size());
            area += r.area;
            for (const Pixel p : r.pixels) {
                ASSERT_TRUE(m.at(p.x, p.y));
                ASSERT_FALSE(seen.at(p.x, p.y));
                seen.set(p.x, p.y, true);
            }
        }
        ASSERT_EQ(area, m.count());
        ASSERT_EQ(regions.size(), oracle_component_count(m));
        for (std::size_t k = 1; k < regions.size(); ++k)
            ASSERT_GE(regions[k - 1].area, regions[k].area);
    }
}

TEST(Vision, ContourIsAClosedBoundaryWalk)
{
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Mask m = tello::testing::random_blob_mask(rng, 40, 40);
        for (const Region& r : connected_components(m)) {
            ASSERT_FALSE(r.contour.empty());
            std::set<std::pair<int, int>> own;
            for (const Pixel p : r.pixels)
                own.insert({p.x, p.y});
            for (std::size_t k = 0; k < r.contour.size(); ++k) {
                const Pixel a = r.contour[k];
                const Pixel b = r.contour[(k + 1) % r.contour.size()];
                ASSERT_TRUE(own.count({a.x, a.y}));
                if (r.contour.size() > 1)
                    ASSERT_LE(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)), 1);
                bool boundary = false;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        if ((dx == 0) != (dy == 0) && !m.get_or(a.x + dx, a.y + dy, false))
                            boundary = true;
                ASSERT_TRUE(boundary);
            }
        }
    }
}

TEST(Vision, SquareContour)
{
    Mask m(20, 20);
    for (int y = 5; y < 15; ++y)
        for (int x = 5; x < 15; ++x)
            m.set(x, y, true);
    const auto regions = connected_components(m);
    ASSERT_EQ(regions.size(), 1u);
    EXPECT_EQ(regions[0].contour.size(), 36u);
    EXPECT_DOUBLE_EQ(contour_perimeter(regions[0].contour), 36.0);
    EXPECT_EQ(approx_polygon(regions[0].contour, 1.0).size(), 4u);
    EXPECT_DOUBLE_EQ(regions[0].cx, 9.5);
}

TEST(Vision, ApproxPolygonErrors)
{
    EXPECT_THROW(approx_polygon({{0, 0}, {1, 0}, {1, 1}}, 1.0), DegenerateContour);
    EXPECT_THROW(approx_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0.0), std::invalid_argument);
}

TEST(Vision, MergeShortEdges)
{
    const std::vector<Pixel> poly = {{0, 0}, {20, 0}, {21, 1}, {10, 20}};
    EXPECT_EQ(merge_short_edges(poly, 3.0).size(), 3u);
    EXPECT_EQ(merge_short_edges(poly, 1.0).size(), 4u);
}

TEST(Vision, ClassifiesRenderedMarkers)
{
    const CameraModel cam;
    for (const Marker& m : tello::testing::marker_catalogue()) {
        const CourseSpec course = tello::testing::single_marker_course(m);
        const Pose pose{course.markers[0].center.x, course.markers[0].center.y, 1.0, 30};
        const Frame f = render_downward(course, pose, cam);
        const auto sightings = detect_markers(f, pose, cam);
        ASSERT_EQ(sightings.size(), 1u) << to_string(m.shape) << " " << to_string(m.color);
        EXPECT_EQ(sightings[0].shape, tello::testing::shape_of(m.shape));
        EXPECT_EQ(sightings[0].color, tello::testing::color_of(m.color));
        EXPECT_NEAR((sightings[0].world - course.markers[0].center).norm(), 0.0, 0.02);
    }
}

TEST(Vision, BorderRegionsAreSkipped)
{
    Marker m = tello::testing::marker_catalogue()[2];
    const CourseSpec course = tello::testing::single_marker_course(m);
    const CameraModel cam;
    const double half_w = footprint_width(1.0, cam) / 2;
    const Pose pose{course.markers[0].center.x - half_w, course.markers[0].center.y, 1.0, 0};
    EXPECT_TRUE(detect_markers(render_downward(course, pose, cam), pose, cam).empty());
}

TEST(Vision, LineEstimate)
{
    Mask straight(90, 90);
    for (int y = 0; y < 90; ++y)
        for (int x = 43; x < 47; ++x)
            straight.set(x, y, true);
    const auto a = estimate_line(straight, 360);
    EXPECT_TRUE(a.visible);
    EXPECT_NEAR(a.lateral_offset, 0.0, 1e-12);
    EXPECT_NEAR(a.heading_error, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(a.coverage_fraction, 1.0);

    Mask shifted(90, 90);
    for (int y = 0; y < 90; ++y)
        for (int x = 63; x < 67; ++x)
            shifted.set(x, y, true);
    EXPECT_NEAR(estimate_line(shifted).lateral_offset, 20.0 / 45.0, 1e-12);

    Mask diagonal(90, 90);
    for (int y = 0; y < 90; ++y)
        for (int x = 0; x < 90; ++x)
            if (std::abs(x - (89 - y)) <= 2)
                diagonal.set(x, y, true);
    EXPECT_NEAR(estimate_line(diagonal).heading_error, 45.0, 1.0);

    EXPECT_FALSE(estimate_line(Mask(90, 90)).visible);
}

TEST(Vision, LineEstimateNeedsTwoBands)
{
    Mask top_only(90, 90);
    for (int y = 0; y < 25; ++y)
        for (int x = 40; x < 50; ++x)
            top_only.set(x, y, true);
    EXPECT_FALSE(estimate_line(top_only).visible);
}
