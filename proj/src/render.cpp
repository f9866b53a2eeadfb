#include "tello_arena/render.hpp"

#include <cmath>

namespace tello {

namespace {

void check_render_args(const Pose& pose, const CameraModel& cam)
{
    if (!(pose.z > 0))
        throw RenderError("NonPositiveAltitude: downward rendering needs z > 0");
    if (cam.orientation != CameraModel::Orientation::DownwardViaMirror)
        throw RenderError("render_downward needs the downward (mirror) camera");
    if (cam.width < 16 || cam.height < 16)
        throw RenderError("camera resolution must be at least 16x16");
}

inline Rgb shade(const CourseSpec& course, Vec2 p)
{
    return course.in_field(p) ? sample_floor_unchecked(course, p) : paint::kOutOfField;
}

// Per-row pixel mapping shared by both kernels.
struct RowMapper {
    Vec2 origin;
    Vec2 right;
    Vec2 fwd;
    double mpp;
    double half_w;
    double half_h;

    Vec2 at(int col, int row) const
    {
        const double u = (col - half_w) * mpp;
        const double v = (half_h - row) * mpp;
        return origin + right * u + fwd * v;
    }
};

RowMapper mapper(const Pose& pose, const CameraModel& cam)
{
    return {{pose.x, pose.y},
            right_vector(pose.yaw_deg),
            heading_vector(pose.yaw_deg),
            metres_per_pixel(pose.z, cam),
            cam.width / 2.0,
            cam.height / 2.0};
}

}  // namespace

double footprint_width(double z, const CameraModel& cam) { return 2.0 * z * std::tan(cam.hfov_deg * kDegToRad / 2.0); }

double metres_per_pixel(double z, const CameraModel& cam) { return footprint_width(z, cam) / cam.width; }

Vec2 pixel_to_floor(const Pose& pose, const CameraModel& cam, double col, double row)
{
    const double mpp = metres_per_pixel(pose.z, cam);
    const double u = (col - cam.width / 2.0) * mpp;
    const double v = (cam.height / 2.0 - row) * mpp;
    return Vec2{pose.x, pose.y} + right_vector(pose.yaw_deg) * u + heading_vector(pose.yaw_deg) * v;
}

Vec2 floor_to_pixel(const Pose& pose, const CameraModel& cam, Vec2 p)
{
    const double mpp = metres_per_pixel(pose.z, cam);
    const Vec2 d = p - Vec2{pose.x, pose.y};
    const double u = d.dot(right_vector(pose.yaw_deg)) / mpp;
    const double v = d.dot(heading_vector(pose.yaw_deg)) / mpp;
    return {cam.width / 2.0 + u, cam.height / 2.0 - v};
}

Frame render_downward(const CourseSpec& course, const Pose& pose, const CameraModel& cam)
{
    check_render_args(pose, cam);
    Frame frame(cam.width, cam.height);
    const RowMapper map = mapper(pose, cam);
    const int h = cam.height;
    const int w = cam.width;
#pragma omp parallel for schedule(static)
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col)
            frame.set(col, row, shade(course, map.at(col, row)));
    return frame;
}

namespace reference {

Frame render_downward(const CourseSpec& course, const Pose& pose, const CameraModel& cam)
{
    check_render_args(pose, cam);
    Frame frame(cam.width, cam.height);
    for (int row = 0; row < cam.height; ++row)
        for (int col = 0; col < cam.width; ++col)
            frame.set(col, row, shade(course, pixel_to_floor(pose, cam, col, row)));
    return frame;
}

}  // namespace reference

Frame course_preview(const CourseSpec& course, int px_per_m)
{
    if (px_per_m < 10)
        throw RenderError("preview resolution must be at least 10 px/m");
    const int w = static_cast<int>(std::lround(course.width * px_per_m));
    const int h = static_cast<int>(std::lround(course.depth * px_per_m));
    Frame frame(w, h);
    const double step = 1.0 / px_per_m;
#pragma omp parallel for schedule(static)
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const Vec2 p{(col + 0.5) * step, course.depth - (row + 0.5) * step};
            frame.set(col, row, sample_floor_unchecked(course, p));
        }
    }
    return frame;
}

}  // namespace tello
