#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "support.hpp"
#include "tello_arena/course.hpp"
#include "tello_arena/render.hpp"

using namespace tello;
using tello::testing::Rng;

namespace {

const std::filesystem::path kData = TELLO_DATA_DIR;

nlohmann::json reference_json()
{
    std::ifstream in(kData / "course_2023.json");
    return nlohmann::json::parse(in);
}

CourseErrc load_error(const nlohmann::json& doc, std::string* path = nullptr)
{
    try {
        load_course(doc.dump());
    } catch (const CourseError& e) {
        if (path)
            *path = e.path();
        return e.code();
    }
    ADD_FAILURE() << "course accepted";
    return CourseErrc::SchemaError;
}

}  // namespace

TEST(Course, ReferenceCoursesLoad)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    EXPECT_EQ(c.profile, CourseProfile::Vision2023);
    EXPECT_EQ(c.markers.size(), 8u);
    EXPECT_TRUE(validate_course(c).empty());
    EXPECT_NEAR(c.line.length(), 8.3 + 0.4 * std::numbers::sqrt2 * 4, 1e-9);

    const CourseSpec r = load_course_file(kData / "course_rings.json");
    EXPECT_EQ(r.profile, CourseProfile::Rings);
    EXPECT_EQ(r.rings.size(), 2u);
    ASSERT_TRUE(r.table.has_value());
    EXPECT_DOUBLE_EQ(r.table->height, 0.70);
}

TEST(Course, DumpLoadRoundTrip)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const CourseSpec again = load_course(dump_course(c));
    EXPECT_EQ(dump_course(again), dump_course(c));
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const Vec2 p{tello::testing::uniform(rng, 0, 4), tello::testing::uniform(rng, 0, 4)};
        ASSERT_EQ(sample_floor(c, p), sample_floor(again, p));
    }
}

TEST(Course, SchemaErrorsCarryPaths)
{
    auto doc = reference_json();
    doc["markers"][2].erase("center");
    std::string path;
    EXPECT_EQ(load_error(doc, &path), CourseErrc::SchemaError);
    EXPECT_EQ(path, "/markers/2/center");

    EXPECT_THROW(load_course("{not json"), CourseError);
}

TEST(Course, DimensionMismatch)
{
    auto doc = reference_json();
    doc["markers"][0]["diameter_cm"] = 25;
    EXPECT_EQ(load_error(doc), CourseErrc::DimensionMismatch);
}

TEST(Course, GeometryOutOfField)
{
    auto doc = reference_json();
    doc["goal"] = {4.5, 3.15};
    EXPECT_EQ(load_error(doc), CourseErrc::GeometryOutOfField);
}

TEST(Course, RuleViolations)
{
    auto far = reference_json();
    far["markers"][2]["center"] = {2.75, 1.6};  // 0.75 m from the nearest line segment
    EXPECT_EQ(load_error(far), CourseErrc::RuleViolation);

    auto overlap = reference_json();
    overlap["markers"][0]["center"] = {0.5, 1.0};
    EXPECT_EQ(load_error(overlap), CourseErrc::RuleViolation);

    auto bad_width = reference_json();
    bad_width["line"]["width_cm"] = 4;
    EXPECT_EQ(load_error(bad_width), CourseErrc::RuleViolation);
}

TEST(Course, SampleFloorLayers)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    EXPECT_EQ(sample_floor(c, {0.5, 2.0}), paint::kBlack);
    EXPECT_EQ(sample_floor(c, {0.225, 1.0}), paint::kRed);
    EXPECT_EQ(sample_floor(c, {3.125, 2.5}), paint::kGreen);
    EXPECT_EQ(sample_floor(c, {3.5, 3.15}), paint::kYellow);
    EXPECT_EQ(sample_floor(c, {0.1, 0.1}), (Rgb{245, 245, 240}));
    EXPECT_THROW(sample_floor(c, {-0.1, 1.0}), CourseError);
}

TEST(Course, LineNearest)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const auto p = line_nearest(c, {0.6, 1.0});
    EXPECT_NEAR(p.distance, 0.1, 1e-12);
    EXPECT_NEAR(p.arclength, 0.6, 1e-12);
    EXPECT_NEAR(p.tangent_deg, 0.0, 1e-12);
    const auto q = line_nearest(c, {1.2, 3.6});
    EXPECT_NEAR(q.tangent_deg, 90.0, 1e-9);

    CourseSpec empty;
    EXPECT_THROW(line_nearest(empty, {1, 1}), CourseError);
}

TEST(Course, LineNearestIsClosestProperty)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    Rng rng(5);
    const double len = c.line.length();
    for (int i = 0; i < 300; ++i) {
        const Vec2 p{tello::testing::uniform(rng, 0, 4), tello::testing::uniform(rng, 0, 4)};
        const auto proj = line_nearest(c, p);
        EXPECT_NEAR((line_point_at(c.line, proj.arclength) - p).norm(), proj.distance, 1e-9);
        for (double s = 0; s <= len; s += 0.01)
            ASSERT_GE((line_point_at(c.line, s) - p).norm(), proj.distance - 1e-9);
    }
}

TEST(Course, MarkerContainsMatchesExtent)
{
    Rng rng(9);
    for (Marker m : tello::testing::marker_catalogue()) {
        m.center = {1, 1};
        m.rotation_deg = tello::testing::uniform(rng, 0, 360);
        for (int i = 0; i < 2000; ++i) {
            const Vec2 p{tello::testing::uniform(rng, 0.7, 1.3), tello::testing::uniform(rng, 0.7, 1.3)};
            if (m.contains(p))
                ASSERT_LE((p - m.center).norm(), m.extent_m() + 1e-12);
        }
    }
}

TEST(Render, FootprintWidth)
{
    const CameraModel cam;
    EXPECT_NEAR(footprint_width(1.0, cam), 1.1547005383792515, 1e-12);
    EXPECT_NEAR(footprint_width(2.0, cam) / footprint_width(1.0, cam), 2.0, 1e-12);
}

TEST(Render, CentrePixelSeesTheFloorBelow)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const CameraModel cam;
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const Pose p{tello::testing::uniform(rng, 0.2, 3.8), tello::testing::uniform(rng, 0.2, 3.8),
                     tello::testing::uniform(rng, 0.3, 2.0), tello::testing::uniform(rng, -180, 180)};
        const Frame f = render_downward(c, p, cam);
        ASSERT_EQ(f.at(cam.width / 2, cam.height / 2), sample_floor(c, {p.x, p.y}));
    }
}

TEST(Render, PixelFloorInverse)
{
    const CameraModel cam;
    Rng rng(19);
    for (int i = 0; i < 500; ++i) {
        const Pose p{1, 2, tello::testing::uniform(rng, 0.3, 2.0), tello::testing::uniform(rng, -180, 180)};
        const double col = tello::testing::uniform(rng, 0, cam.width), row = tello::testing::uniform(rng, 0, cam.height);
        const Vec2 back = floor_to_pixel(p, cam, pixel_to_floor(p, cam, col, row));
        ASSERT_NEAR(back.x, col, 1e-9);
        ASSERT_NEAR(back.y, row, 1e-9);
    }
}

TEST(Render, ImageOrientation)
{
    // Facing +y, the top of the image is ahead and the right edge is +x.
    const CameraModel cam;
    const Pose p{2, 2, 1, 0};
    const Vec2 ahead = pixel_to_floor(p, cam, cam.width / 2.0, 0);
    const Vec2 right = pixel_to_floor(p, cam, cam.width, cam.height / 2.0);
    EXPECT_GT(ahead.y, 2.0);
    EXPECT_GT(right.x, 2.0);
    const Pose east{2, 2, 1, 90};
    EXPECT_GT(pixel_to_floor(east, cam, cam.width / 2.0, 0).x, 2.0);
}

TEST(Render, OutsideFieldIsGrey)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const Frame f = render_downward(c, {0.05, 2, 1, 0}, CameraModel{});
    EXPECT_EQ(f.at(0, 120), paint::kOutOfField);
}

TEST(Render, ParallelMatchesSerial)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    Rng rng(23);
    for (int i = 0; i < 20; ++i) {
        const Pose p{tello::testing::uniform(rng, 0, 4), tello::testing::uniform(rng, 0, 4),
                     tello::testing::uniform(rng, 0.3, 2.0), tello::testing::uniform(rng, -180, 180)};
        ASSERT_EQ(render_downward(c, p, CameraModel{}), reference::render_downward(c, p, CameraModel{}));
    }
}

TEST(Render, RejectsBadArguments)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    EXPECT_THROW(render_downward(c, {1, 1, 0, 0}, CameraModel{}), RenderError);
    CameraModel fwd;
    fwd.orientation = CameraModel::Orientation::Forward;
    EXPECT_THROW(render_downward(c, {1, 1, 1, 0}, fwd), RenderError);
}

TEST(Render, PreviewSize)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const Frame f = course_preview(c, 100);
    EXPECT_EQ(f.width(), 400);
    EXPECT_EQ(f.height(), 400);
    // Row 0 is the far edge of the field; the start pad sits near the bottom.
    EXPECT_EQ(f.at(50, 400 - 200), paint::kBlack);
}
