#pragma once

// Software renderer for the mirror-down camera and orthographic course previews.

#include <stdexcept>

#include "tello_arena/course.hpp"
#include "tello_arena/image.hpp"

namespace tello {

struct CameraModel {
    enum class Orientation { DownwardViaMirror, Forward };

    double hfov_deg = 60.0;
    int width = 320;
    int height = 240;
    Orientation orientation = Orientation::DownwardViaMirror;
};

struct Pose {
    double x = 0, y = 0;  // m
    double z = 0;         // m above ground
    double yaw_deg = 0;
};

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Floor width covered by the image at altitude z (m).
double footprint_width(double z, const CameraModel& cam);
/// Floor distance per pixel at altitude z (m).
double metres_per_pixel(double z, const CameraModel& cam);

/// Floor point seen by pixel (col, row); pixel (w/2, h/2) sees the point straight below.
Vec2 pixel_to_floor(const Pose& pose, const CameraModel& cam, double col, double row);
/// Inverse of pixel_to_floor.
Vec2 floor_to_pixel(const Pose& pose, const CameraModel& cam, Vec2 p);

/// Parallel (OpenMP over rows) renderer.
Frame render_downward(const CourseSpec& course, const Pose& pose, const CameraModel& cam);

Frame course_preview(const CourseSpec& course, int px_per_m);

namespace reference {
/// Serial renderer; the parallel kernel must match it byte for byte.
Frame render_downward(const CourseSpec& course, const Pose& pose, const CameraModel& cam);
}  // namespace reference

}  // namespace tello
