#pragma once

// Competition field geometry: floor paint, line, markers, rings and table.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tello_arena/geometry.hpp"
#include "tello_arena/image.hpp"

namespace tello {

enum class CourseProfile { Vision2023, Rings, Custom };

enum class MarkerShape { Rectangle, Circle, Triangle };
enum class MarkerColor { Red, Blue, Green, Yellow };
enum class LineSide { Left, Right, OnLine };

const char* to_string(MarkerShape s);
const char* to_string(MarkerColor c);
Rgb paint_of(MarkerColor c);

struct TexturePatch {
    enum class Pattern { Checker, Noise };
    double x = 0, y = 0, w = 0, h = 0;  // m
    Pattern pattern = Pattern::Checker;
    double cell_cm = 10;
    Rgb color_a{200, 200, 200};
    Rgb color_b{160, 160, 160};
    std::uint32_t seed = 0;
    int amplitude = 60;
};

struct LinePath {
    std::vector<Vec2> points;  // m
    double width_cm = 5;

    bool empty() const { return points.size() < 2; }
    double length() const;
};

struct Marker {
    MarkerShape shape = MarkerShape::Circle;
    MarkerColor color = MarkerColor::Red;
    // Rectangle: width x height; circle: diameter in width; triangle: side in width.
    double width_cm = 20;
    double height_cm = 0;
    Vec2 center;
    LineSide line_side = LineSide::OnLine;
    double rotation_deg = 0;  // counterclockwise, about the center

    /// Radius of the smallest circle around the center containing the shape, in m.
    double extent_m() const;
    bool contains(Vec2 p) const;
};

struct Ring {
    Vec2 center;
    double diameter = 1.0;       // m
    double center_height = 0.5;  // m
    double tube_radius_cm = 2;
    double normal_yaw_deg = 0;  // heading of the ring axis
};

struct Table {
    Vec2 center;
    double top_w = 0.6, top_d = 0.6;  // m
    double height = 0.70;             // m
};

struct CourseSpec {
    std::string name;
    CourseProfile profile = CourseProfile::Custom;
    double width = 4, depth = 4;  // m
    Rgb base_color = paint::kWhite;
    std::vector<TexturePatch> patches;
    LinePath line;
    std::vector<Marker> markers;
    Vec2 start_pad;
    std::optional<Vec2> victim;
    std::optional<Vec2> goal;
    std::vector<Ring> rings;
    std::optional<Table> table;

    bool in_field(Vec2 p) const { return p.x >= 0 && p.y >= 0 && p.x <= width && p.y <= depth; }
};

enum class CourseErrc { SchemaError, GeometryOutOfField, DimensionMismatch, RuleViolation, OutOfField, NoLine };

class CourseError : public std::runtime_error {
public:
    CourseError(CourseErrc code, std::string path, const std::string& detail);
    CourseErrc code() const noexcept { return code_; }
    const std::string& path() const noexcept { return path_; }

private:
    CourseErrc code_;
    std::string path_;
};

struct Violation {
    std::string field;
    std::string rule;
};

CourseSpec load_course(const std::string& document);
CourseSpec load_course_file(const std::filesystem::path& path);
std::string dump_course(const CourseSpec& course);

std::vector<Violation> validate_course(const CourseSpec& course);

/// Ground-truth paint at a floor point; markers over line over patches over base.
Rgb sample_floor(const CourseSpec& course, Vec2 p);
/// sample_floor without the field check; callers guarantee p is inside.
Rgb sample_floor_unchecked(const CourseSpec& course, Vec2 p);

struct LineProjection {
    double arclength = 0;  // m from line start
    double distance = 0;   // m
    double tangent_deg = 0;
    Vec2 point;
};

LineProjection line_nearest(const CourseSpec& course, Vec2 p);
LineProjection line_nearest(const LinePath& line, Vec2 p);
/// Point at a given arclength (clamped to the line).
Vec2 line_point_at(const LinePath& line, double arclength);

// Marker size table for the vision challenge: (shape, color) -> width, height in cm.
std::optional<std::pair<double, double>> expected_marker_size(MarkerShape shape, MarkerColor color);

inline constexpr double kMarkerMaxLineDistance = 0.50;  // m
inline constexpr double kLineStartTolerance = 0.20;     // m

}  // namespace tello
