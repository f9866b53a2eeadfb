#pragma once

#include <cmath>
#include <numbers>

namespace tello {

struct Vec2 {
    double x = 0;
    double y = 0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    bool operator==(const Vec2&) const = default;
};

struct Vec3 {
    double x = 0;
    double y = 0;
    double z = 0;

    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(Vec3 o) const { return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x}; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec2 xy() const { return {x, y}; }
    bool operator==(const Vec3&) const = default;
};

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Headings are degrees clockwise from +y (the "forward" field axis), matching the SDK's "cw".
inline Vec2 heading_vector(double yaw_deg)
{
    const double a = yaw_deg * kDegToRad;
    return {std::sin(a), std::cos(a)};
}

inline Vec2 right_vector(double yaw_deg)
{
    const double a = yaw_deg * kDegToRad;
    return {std::cos(a), -std::sin(a)};
}

inline double heading_of(Vec2 d) { return std::atan2(d.x, d.y) * kRadToDeg; }

/// Wraps an angle into (-180, 180].
inline double wrap_degrees(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0)
        w += 360.0;
    else if (w > 180.0)
        w -= 360.0;
    return w;
}

}  // namespace tello
