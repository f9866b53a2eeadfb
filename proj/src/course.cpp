#include "tello_arena/course.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace tello {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

[[noreturn]] void schema_fail(const std::string& path, const std::string& why)
{
    throw CourseError(CourseErrc::SchemaError, path, why);
}

const json& require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object())
        schema_fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        schema_fail(child(path, key), "missing required field");
    return *it;
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number())
        schema_fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        schema_fail(path, "expected a finite number");
    return d;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path)
{
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, child(path, key));
}

Vec2 vec2(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2)
        schema_fail(path, "expected [x, y]");
    return {number(v[0], child(path, 0)), number(v[1], child(path, 1))};
}

Rgb rgb(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 3)
        schema_fail(path, "expected [r, g, b]");
    Rgb c;
    std::uint8_t* channels[3] = {&c.r, &c.g, &c.b};
    for (std::size_t i = 0; i < 3; ++i) {
        const double d = number(v[i], child(path, i));
        if (d < 0 || d > 255 || d != std::floor(d))
            schema_fail(child(path, i), "expected an integer in [0,255]");
        *channels[i] = static_cast<std::uint8_t>(d);
    }
    return c;
}

std::string text(const json& v, const std::string& path)
{
    if (!v.is_string())
        schema_fail(path, "expected a string");
    return v.get<std::string>();
}

MarkerShape shape_from(const std::string& s, const std::string& path)
{
    if (s == "rectangle")
        return MarkerShape::Rectangle;
    if (s == "circle")
        return MarkerShape::Circle;
    if (s == "triangle")
        return MarkerShape::Triangle;
    schema_fail(path, "unknown shape '" + s + "'");
}

MarkerColor color_from(const std::string& s, const std::string& path)
{
    if (s == "red")
        return MarkerColor::Red;
    if (s == "blue")
        return MarkerColor::Blue;
    if (s == "green")
        return MarkerColor::Green;
    if (s == "yellow")
        return MarkerColor::Yellow;
    schema_fail(path, "unknown color '" + s + "'");
}

const char* side_name(LineSide s)
{
    switch (s) {
    case LineSide::Left: return "left";
    case LineSide::Right: return "right";
    case LineSide::OnLine: return "on-line";
    }
    return "?";
}

const char* profile_name(CourseProfile p)
{
    switch (p) {
    case CourseProfile::Vision2023: return "2023";
    case CourseProfile::Rings: return "rings";
    case CourseProfile::Custom: return "custom";
    }
    return "?";
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

double line_distance(const LinePath& line, Vec2 p)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.points.size(); ++i)
        best = std::min(best, point_segment_distance(p, line.points[i], line.points[i + 1]));
    return best;
}

// Deterministic per-centimetre-cell value in [0,1).
double cell_noise(std::uint32_t seed, long ix, long iy)
{
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ seed;
    h ^= static_cast<std::uint64_t>(ix) * 0xBF58476D1CE4E5B9ULL;
    h = (h ^ (h >> 31)) * 0x94D049BB133111EBULL;
    h ^= static_cast<std::uint64_t>(iy) * 0xD6E8FEB86659FD93ULL;
    h = (h ^ (h >> 29)) * 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 32;
    return static_cast<double>(h & 0xFFFFFF) / static_cast<double>(0x1000000);
}

}  // namespace

const char* to_string(MarkerShape s)
{
    switch (s) {
    case MarkerShape::Rectangle: return "rectangle";
    case MarkerShape::Circle: return "circle";
    case MarkerShape::Triangle: return "triangle";
    }
    return "?";
}

const char* to_string(MarkerColor c)
{
    switch (c) {
    case MarkerColor::Red: return "red";
    case MarkerColor::Blue: return "blue";
    case MarkerColor::Green: return "green";
    case MarkerColor::Yellow: return "yellow";
    }
    return "?";
}

Rgb paint_of(MarkerColor c)
{
    switch (c) {
    case MarkerColor::Red: return paint::kRed;
    case MarkerColor::Blue: return paint::kBlue;
    case MarkerColor::Green: return paint::kGreen;
    case MarkerColor::Yellow: return paint::kYellow;
    }
    return paint::kWhite;
}

CourseError::CourseError(CourseErrc code, std::string path, const std::string& detail)
    : std::runtime_error(path.empty() ? detail : path + ": " + detail), code_(code), path_(std::move(path))
{
}

double LinePath::length() const
{
    double total = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        total += (points[i + 1] - points[i]).norm();
    return total;
}

double Marker::extent_m() const
{
    switch (shape) {
    case MarkerShape::Circle: return width_cm / 200.0;
    case MarkerShape::Rectangle: return std::hypot(width_cm, height_cm) / 200.0;
    case MarkerShape::Triangle: return width_cm / std::sqrt(3.0) / 100.0;
    }
    return 0;
}

bool Marker::contains(Vec2 p) const
{
    const Vec2 d = p - center;
    if (shape == MarkerShape::Circle) {
        const double r = width_cm / 200.0;
        return d.dot(d) <= r * r;
    }
    // Rotate into the marker frame.
    const double a = -rotation_deg * kDegToRad;
    const double c = std::cos(a), s = std::sin(a);
    const Vec2 q{c * d.x - s * d.y, s * d.x + c * d.y};
    if (shape == MarkerShape::Rectangle)
        return std::abs(q.x) <= width_cm / 200.0 && std::abs(q.y) <= height_cm / 200.0;
    // Equilateral triangle with centroid at the origin and apex towards +y.
    const double side = width_cm / 100.0;
    const double h = side * std::sqrt(3.0) / 2.0;
    const double base_y = -h / 3.0;
    const double apex_y = 2.0 * h / 3.0;
    if (q.y < base_y || q.y > apex_y)
        return false;
    const double half = (apex_y - q.y) / h * side / 2.0;
    return std::abs(q.x) <= half;
}

std::optional<std::pair<double, double>> expected_marker_size(MarkerShape shape, MarkerColor color)
{
    const bool red_or_blue = color == MarkerColor::Red || color == MarkerColor::Blue;
    if (red_or_blue) {
        switch (shape) {
        case MarkerShape::Rectangle: return std::pair{24.0, 12.0};
        case MarkerShape::Circle: return std::pair{20.0, 0.0};
        case MarkerShape::Triangle: return std::pair{15.0, 0.0};
        }
    }
    if (shape == MarkerShape::Circle)
        return std::pair{40.0, 0.0};
    return std::nullopt;
}

CourseSpec load_course(const std::string& document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        schema_fail("", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        schema_fail("", "course document must be an object");

    CourseSpec c;
    const std::string root;
    c.name = doc.contains("name") ? text(doc["name"], "/name") : "";
    if (doc.contains("profile")) {
        const std::string p = text(doc["profile"], "/profile");
        if (p == "2023")
            c.profile = CourseProfile::Vision2023;
        else if (p == "rings")
            c.profile = CourseProfile::Rings;
        else if (p == "custom")
            c.profile = CourseProfile::Custom;
        else
            schema_fail("/profile", "expected 2023, rings or custom");
    }
    const Vec2 size = vec2(require(doc, "field_size", root), "/field_size");
    c.width = size.x;
    c.depth = size.y;
    if (c.width <= 0 || c.depth <= 0)
        schema_fail("/field_size", "field dimensions must be positive");
    c.start_pad = vec2(require(doc, "start_pad", root), "/start_pad");

    if (auto it = doc.find("floor"); it != doc.end()) {
        const json& floor = *it;
        if (!floor.is_object())
            schema_fail("/floor", "expected an object");
        if (floor.contains("base_color"))
            c.base_color = rgb(floor["base_color"], "/floor/base_color");
        if (auto pit = floor.find("patches"); pit != floor.end()) {
            if (!pit->is_array())
                schema_fail("/floor/patches", "expected an array");
            for (std::size_t i = 0; i < pit->size(); ++i) {
                const json& pj = (*pit)[i];
                const std::string path = child("/floor/patches", i);
                TexturePatch patch;
                const json& rect = require(pj, "rect", path);
                if (!rect.is_array() || rect.size() != 4)
                    schema_fail(child(path, "rect"), "expected [x, y, w, h]");
                patch.x = number(rect[0], child(path, "rect/0"));
                patch.y = number(rect[1], child(path, "rect/1"));
                patch.w = number(rect[2], child(path, "rect/2"));
                patch.h = number(rect[3], child(path, "rect/3"));
                const std::string pattern = text(require(pj, "pattern", path), child(path, "pattern"));
                if (pattern == "checker") {
                    patch.pattern = TexturePatch::Pattern::Checker;
                    patch.cell_cm = number_or(pj, "cell_cm", 10, path);
                    if (patch.cell_cm <= 0)
                        schema_fail(child(path, "cell_cm"), "must be positive");
                    if (auto cit = pj.find("colors"); cit != pj.end()) {
                        if (!cit->is_array() || cit->size() != 2)
                            schema_fail(child(path, "colors"), "expected two colors");
                        patch.color_a = rgb((*cit)[0], child(path, "colors/0"));
                        patch.color_b = rgb((*cit)[1], child(path, "colors/1"));
                    }
                } else if (pattern == "noise") {
                    patch.pattern = TexturePatch::Pattern::Noise;
                    const double seed = number_or(pj, "seed", 0, path);
                    if (seed < 0 || seed != std::floor(seed))
                        schema_fail(child(path, "seed"), "expected a non-negative integer");
                    patch.seed = static_cast<std::uint32_t>(seed);
                    patch.amplitude = static_cast<int>(number_or(pj, "amplitude", 60, path));
                    if (patch.amplitude < 0 || patch.amplitude > 255)
                        schema_fail(child(path, "amplitude"), "expected [0,255]");
                } else {
                    schema_fail(child(path, "pattern"), "expected checker or noise");
                }
                c.patches.push_back(patch);
            }
        }
    }

    if (auto it = doc.find("line"); it != doc.end() && !it->is_null()) {
        const json& lj = *it;
        const json& pts = require(lj, "points", "/line");
        if (!pts.is_array())
            schema_fail("/line/points", "expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i)
            c.line.points.push_back(vec2(pts[i], child("/line/points", i)));
        c.line.width_cm = number_or(lj, "width_cm", 5, "/line");
    }

    if (auto it = doc.find("markers"); it != doc.end()) {
        if (!it->is_array())
            schema_fail("/markers", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& mj = (*it)[i];
            const std::string path = child("/markers", i);
            Marker m;
            m.shape = shape_from(text(require(mj, "shape", path), child(path, "shape")), child(path, "shape"));
            m.color = color_from(text(require(mj, "color", path), child(path, "color")), child(path, "color"));
            m.center = vec2(require(mj, "center", path), child(path, "center"));
            if (m.shape == MarkerShape::Rectangle) {
                const Vec2 s = vec2(require(mj, "size_cm", path), child(path, "size_cm"));
                m.width_cm = s.x;
                m.height_cm = s.y;
            } else if (m.shape == MarkerShape::Circle) {
                m.width_cm = number(require(mj, "diameter_cm", path), child(path, "diameter_cm"));
            } else {
                m.width_cm = number(require(mj, "side_cm", path), child(path, "side_cm"));
            }
            if (m.width_cm <= 0 || m.height_cm < 0)
                schema_fail(path, "marker size must be positive");
            m.rotation_deg = number_or(mj, "rotation_deg", 0, path);
            if (mj.contains("line_side")) {
                const std::string side = text(mj["line_side"], child(path, "line_side"));
                if (side == "left")
                    m.line_side = LineSide::Left;
                else if (side == "right")
                    m.line_side = LineSide::Right;
                else if (side == "on-line")
                    m.line_side = LineSide::OnLine;
                else
                    schema_fail(child(path, "line_side"), "expected left, right or on-line");
            }
            c.markers.push_back(m);
        }
    }

    if (auto it = doc.find("victim"); it != doc.end() && !it->is_null())
        c.victim = vec2(*it, "/victim");
    if (auto it = doc.find("goal"); it != doc.end() && !it->is_null())
        c.goal = vec2(*it, "/goal");

    if (auto it = doc.find("rings"); it != doc.end()) {
        if (!it->is_array())
            schema_fail("/rings", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& rj = (*it)[i];
            const std::string path = child("/rings", i);
            Ring r;
            r.center = vec2(require(rj, "center", path), child(path, "center"));
            r.diameter = number_or(rj, "diameter", 1.0, path);
            r.center_height = number(require(rj, "center_height", path), child(path, "center_height"));
            r.tube_radius_cm = number_or(rj, "tube_radius_cm", 2, path);
            r.normal_yaw_deg = number_or(rj, "normal_yaw_deg", 0, path);
            if (r.diameter <= 0 || r.tube_radius_cm <= 0)
                schema_fail(path, "ring dimensions must be positive");
            c.rings.push_back(r);
        }
    }

    if (auto it = doc.find("table"); it != doc.end() && !it->is_null()) {
        Table t;
        t.center = vec2(require(*it, "center", "/table"), "/table/center");
        const Vec2 top = vec2(require(*it, "top_size", "/table"), "/table/top_size");
        t.top_w = top.x;
        t.top_d = top.y;
        t.height = number(require(*it, "height", "/table"), "/table/height");
        if (t.top_w <= 0 || t.top_d <= 0 || t.height <= 0)
            schema_fail("/table", "table dimensions must be positive");
        c.table = t;
    }

    const auto violations = validate_course(c);
    if (!violations.empty()) {
        auto find_rule = [&](const char* rule) {
            return std::find_if(violations.begin(), violations.end(),
                                [&](const Violation& v) { return v.rule == rule; });
        };
        if (auto it = find_rule("DimensionMismatch"); it != violations.end())
            throw CourseError(CourseErrc::DimensionMismatch, it->field, it->rule);
        if (auto it = find_rule("GeometryOutOfField"); it != violations.end())
            throw CourseError(CourseErrc::GeometryOutOfField, it->field, it->rule);
        throw CourseError(CourseErrc::RuleViolation, violations.front().field, violations.front().rule);
    }
    return c;
}

CourseSpec load_course_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw CourseError(CourseErrc::SchemaError, path.string(), "cannot open course file");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_course(ss.str());
}

std::string dump_course(const CourseSpec& c)
{
    auto v2 = [](Vec2 v) { return json::array({v.x, v.y}); };
    auto col = [](Rgb v) { return json::array({v.r, v.g, v.b}); };
    json doc;
    doc["name"] = c.name;
    doc["profile"] = profile_name(c.profile);
    doc["field_size"] = json::array({c.width, c.depth});
    doc["start_pad"] = v2(c.start_pad);
    json patches = json::array();
    for (const auto& p : c.patches) {
        json pj;
        pj["rect"] = json::array({p.x, p.y, p.w, p.h});
        if (p.pattern == TexturePatch::Pattern::Checker) {
            pj["pattern"] = "checker";
            pj["cell_cm"] = p.cell_cm;
            pj["colors"] = json::array({col(p.color_a), col(p.color_b)});
        } else {
            pj["pattern"] = "noise";
            pj["seed"] = p.seed;
            pj["amplitude"] = p.amplitude;
        }
        patches.push_back(pj);
    }
    doc["floor"] = {{"base_color", col(c.base_color)}, {"patches", patches}};
    if (!c.line.points.empty()) {
        json pts = json::array();
        for (auto p : c.line.points)
            pts.push_back(v2(p));
        doc["line"] = {{"points", pts}, {"width_cm", c.line.width_cm}};
    }
    json markers = json::array();
    for (const auto& m : c.markers) {
        json mj;
        mj["shape"] = to_string(m.shape);
        mj["color"] = to_string(m.color);
        mj["center"] = v2(m.center);
        if (m.shape == MarkerShape::Rectangle)
            mj["size_cm"] = json::array({m.width_cm, m.height_cm});
        else if (m.shape == MarkerShape::Circle)
            mj["diameter_cm"] = m.width_cm;
        else
            mj["side_cm"] = m.width_cm;
        mj["line_side"] = side_name(m.line_side);
        mj["rotation_deg"] = m.rotation_deg;
        markers.push_back(mj);
    }
    doc["markers"] = markers;
    if (c.victim)
        doc["victim"] = v2(*c.victim);
    if (c.goal)
        doc["goal"] = v2(*c.goal);
    json rings = json::array();
    for (const auto& r : c.rings) {
        rings.push_back({{"center", v2(r.center)},
                         {"diameter", r.diameter},
                         {"center_height", r.center_height},
                         {"tube_radius_cm", r.tube_radius_cm},
                         {"normal_yaw_deg", r.normal_yaw_deg}});
    }
    doc["rings"] = rings;
    if (c.table) {
        doc["table"] = {{"center", v2(c.table->center)},
                        {"top_size", json::array({c.table->top_w, c.table->top_d})},
                        {"height", c.table->height}};
    }
    return doc.dump(2);
}

std::vector<Violation> validate_course(const CourseSpec& c)
{
    std::vector<Violation> out;
    auto add = [&](std::string field, std::string rule) { out.push_back({std::move(field), std::move(rule)}); };

    if (c.width <= 0 || c.depth <= 0)
        add("/field_size", "FieldSize");
    if (c.profile == CourseProfile::Vision2023 && (c.width != 4.0 || c.depth != 4.0))
        add("/field_size", "FieldSize2023");

    if (!c.in_field(c.start_pad))
        add("/start_pad", "GeometryOutOfField");
    if (c.victim && !c.in_field(*c.victim))
        add("/victim", "GeometryOutOfField");
    if (c.goal && !c.in_field(*c.goal))
        add("/goal", "GeometryOutOfField");
    for (std::size_t i = 0; i < c.line.points.size(); ++i)
        if (!c.in_field(c.line.points[i]))
            add("/line/points/" + std::to_string(i), "GeometryOutOfField");
    for (std::size_t i = 0; i < c.patches.size(); ++i) {
        const auto& p = c.patches[i];
        if (p.w <= 0 || p.h <= 0 || !c.in_field({p.x, p.y}) || !c.in_field({p.x + p.w, p.y + p.h}))
            add("/floor/patches/" + std::to_string(i), "GeometryOutOfField");
    }

    const bool has_line = !c.line.points.empty();
    if (c.profile == CourseProfile::Vision2023 && !has_line)
        add("/line", "LinePoints");
    if (has_line) {
        if (c.line.points.size() < 2)
            add("/line/points", "LinePoints");
        if (c.line.width_cm <= 0)
            add("/line/width_cm", "LineWidthRule");
        if (c.profile == CourseProfile::Vision2023 && c.line.width_cm != 5.0)
            add("/line/width_cm", "LineWidthRule");
        if ((c.line.points.front() - c.start_pad).norm() > kLineStartTolerance + 1e-9)
            add("/line/points/0", "LineStartNearPad");
    }

    for (std::size_t i = 0; i < c.markers.size(); ++i) {
        const Marker& m = c.markers[i];
        const std::string path = "/markers/" + std::to_string(i);
        const double r = m.extent_m();
        if (m.center.x - r < 0 || m.center.y - r < 0 || m.center.x + r > c.width || m.center.y + r > c.depth)
            add(path, "GeometryOutOfField");
        const auto expected = expected_marker_size(m.shape, m.color);
        if (!expected) {
            add(path, "InvalidMarker");
        } else if (std::abs(expected->first - m.width_cm) > 1e-9 ||
                   (m.shape == MarkerShape::Rectangle && std::abs(expected->second - m.height_cm) > 1e-9)) {
            add(path, "DimensionMismatch");
        }
        if (has_line && c.line.points.size() >= 2) {
            const double d = line_distance(c.line, m.center);
            const bool behavior_marker = m.color == MarkerColor::Red || m.color == MarkerColor::Blue;
            if (behavior_marker && d > kMarkerMaxLineDistance)
                add(path, "TooFarFromLine");
            // No part of the marker may cover line paint: probe the marker outline densely.
            const double half_line = c.line.width_cm / 200.0;
            if (d <= half_line + r) {
                bool overlaps = false;
                const int steps = 64;
                for (int a = 0; a < steps && !overlaps; ++a) {
                    for (int k = 0; k <= 8 && !overlaps; ++k) {
                        const double ang = 2 * std::numbers::pi * a / steps;
                        const Vec2 p = m.center + Vec2{std::cos(ang), std::sin(ang)} * (r * k / 8.0);
                        if (m.contains(p) && line_distance(c.line, p) <= half_line)
                            overlaps = true;
                    }
                }
                if (overlaps)
                    add(path, "MarkerOverlapsLine");
            }
        }
    }

    auto has_circle_at = [&](MarkerColor color, Vec2 at) {
        return std::any_of(c.markers.begin(), c.markers.end(), [&](const Marker& m) {
            return m.shape == MarkerShape::Circle && m.color == color && m.width_cm == 40.0 &&
                   (m.center - at).norm() <= 0.01;
        });
    };
    if (c.victim && !has_circle_at(MarkerColor::Green, *c.victim))
        add("/victim", "VictimCircle");
    if (c.goal && !has_circle_at(MarkerColor::Yellow, *c.goal))
        add("/goal", "GoalCircle");

    for (std::size_t i = 0; i < c.rings.size(); ++i) {
        const Ring& r = c.rings[i];
        const std::string path = "/rings/" + std::to_string(i);
        if (!c.in_field(r.center))
            add(path, "GeometryOutOfField");
        if (c.profile == CourseProfile::Rings && std::abs(r.diameter - 1.0) > 1e-9)
            add(path + "/diameter", "RingDiameter");
    }
    if (c.table) {
        const Table& t = *c.table;
        if (!c.in_field(t.center - Vec2{t.top_w / 2, t.top_d / 2}) ||
            !c.in_field(t.center + Vec2{t.top_w / 2, t.top_d / 2}))
            add("/table", "GeometryOutOfField");
        if (c.profile == CourseProfile::Rings && std::abs(t.height - 0.70) > 1e-9)
            add("/table/height", "TableHeight");
    }
    return out;
}

Rgb sample_floor_unchecked(const CourseSpec& c, Vec2 p)
{
    for (const Marker& m : c.markers)
        if (m.contains(p))
            return paint_of(m.color);
    if (c.line.points.size() >= 2 && line_distance(c.line, p) <= c.line.width_cm / 200.0)
        return paint::kBlack;
    for (const TexturePatch& patch : c.patches) {
        if (p.x < patch.x || p.y < patch.y || p.x > patch.x + patch.w || p.y > patch.y + patch.h)
            continue;
        if (patch.pattern == TexturePatch::Pattern::Checker) {
            const double cell = patch.cell_cm / 100.0;
            const long ix = static_cast<long>(std::floor((p.x - patch.x) / cell));
            const long iy = static_cast<long>(std::floor((p.y - patch.y) / cell));
            return ((ix + iy) & 1) == 0 ? patch.color_a : patch.color_b;
        }
        const long ix = static_cast<long>(std::floor(p.x * 100.0));
        const long iy = static_cast<long>(std::floor(p.y * 100.0));
        const int v = 255 - static_cast<int>(patch.amplitude * cell_noise(patch.seed, ix, iy));
        const auto g = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        return {g, g, g};
    }
    return c.base_color;
}

Rgb sample_floor(const CourseSpec& c, Vec2 p)
{
    if (!c.in_field(p))
        throw CourseError(CourseErrc::OutOfField, "", "floor point outside the field");
    return sample_floor_unchecked(c, p);
}

LineProjection line_nearest(const LinePath& line, Vec2 p)
{
    if (line.points.size() < 2)
        throw CourseError(CourseErrc::NoLine, "/line", "course has no line");
    LineProjection best;
    double best_d = std::numeric_limits<double>::infinity();
    double start = 0;
    for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
        const Vec2 a = line.points[i];
        const Vec2 ab = line.points[i + 1] - a;
        const double len = ab.norm();
        double t = len > 0 ? std::clamp((p - a).dot(ab) / (len * len), 0.0, 1.0) : 0.0;
        const Vec2 q = a + ab * t;
        const double d = (p - q).norm();
        if (d < best_d) {
            best_d = d;
            best.arclength = start + t * len;
            best.distance = d;
            best.tangent_deg = heading_of(ab);
            best.point = q;
        }
        start += len;
    }
    return best;
}

LineProjection line_nearest(const CourseSpec& course, Vec2 p) { return line_nearest(course.line, p); }

Vec2 line_point_at(const LinePath& line, double s)
{
    if (line.points.empty())
        return {};
    double start = 0;
    for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
        const Vec2 ab = line.points[i + 1] - line.points[i];
        const double len = ab.norm();
        if (s <= start + len || i + 2 == line.points.size()) {
            const double t = len > 0 ? std::clamp((s - start) / len, 0.0, 1.0) : 0.0;
            return line.points[i] + ab * t;
        }
        start += len;
    }
    return line.points.back();
}

}  // namespace tello
