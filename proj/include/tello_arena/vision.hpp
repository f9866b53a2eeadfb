#pragma once

// Image pipeline for the downward camera: HSV thresholding, morphology,
// connected components with Moore contours, polygon approximation, shape
// classification and line estimation.

#include <optional>
#include <stdexcept>
#include <vector>

#include "tello_arena/image.hpp"

namespace tello {

struct Hsv {
    double h = 0;  // degrees [0,360)
    double s = 0;  // [0,1]
    double v = 0;  // [0,1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
inline Hsv rgb_to_hsv(Rgb c) { return rgb_to_hsv(c.r, c.g, c.b); }

struct HsvRange {
    double hue_lo = 0, hue_hi = 360;  // wraps when hue_lo > hue_hi
    double sat_lo = 0, sat_hi = 1;
    double val_lo = 0, val_hi = 1;

    bool contains(const Hsv& p) const;
};

enum class ColorClass { Red, Blue, Green, Yellow, Other };
const char* to_string(ColorClass c);

namespace ranges {
inline constexpr HsvRange kRed{340, 20, 0.4, 1, 0.3, 1};
inline constexpr HsvRange kBlue{200, 260, 0.4, 1, 0.3, 1};
inline constexpr HsvRange kGreen{90, 150, 0.4, 1, 0.3, 1};
inline constexpr HsvRange kYellow{40, 70, 0.4, 1, 0.3, 1};
inline constexpr HsvRange kBlack{0, 360, 0, 1, 0, 0.25};
const HsvRange& of(ColorClass c);
}  // namespace ranges

/// Parallel thresholding kernel.
Mask in_range(const Frame& frame, const HsvRange& range);

enum class MorphOp { Erode, Dilate, Open, Close };

/// Square structuring element of side 2*radius+1; pixels outside the image are background.
Mask morphology(const Mask& mask, MorphOp op, int radius);

namespace reference {
Mask in_range(const Frame& frame, const HsvRange& range);
Mask morphology(const Mask& mask, MorphOp op, int radius);
}  // namespace reference

struct Pixel {
    int x = 0, y = 0;
    bool operator==(const Pixel&) const = default;
};

struct BoundingBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

struct Region {
    int label = 0;
    std::size_t area = 0;
    double cx = 0, cy = 0;  // centroid, px
    BoundingBox bbox;
    std::vector<Pixel> contour;  // closed 8-connected boundary, clockwise
    std::vector<Pixel> pixels;
};

std::vector<Region> connected_components(const Mask& mask);

/// Length of the closed contour (unit and diagonal steps).
double contour_perimeter(const std::vector<Pixel>& contour);

class DegenerateContour : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ramer-Douglas-Peucker on a closed contour split at its two most distant points.
std::vector<Pixel> approx_polygon(const std::vector<Pixel>& contour, double epsilon);

/// Collapses the shortest edge into its midpoint until every edge reaches min_length or three vertices remain.
std::vector<Pixel> merge_short_edges(std::vector<Pixel> polygon, double min_length);

enum class ShapeClass { Triangle, Rectangle, Circle, Unknown };
const char* to_string(ShapeClass s);

struct ShapeReading {
    ShapeClass shape = ShapeClass::Unknown;
    ColorClass color = ColorClass::Other;
    double circularity = 0;
    int vertex_count = 0;
    double cx = 0, cy = 0;
    std::size_t area = 0;
};

struct ClassifierConfig {
    std::size_t min_area = 80;
    double epsilon_fraction = 0.03;
    double min_edge_fraction = 0.08;  // polygon edges shorter than this share of the perimeter are merged
    double circularity_threshold = 0.85;
    double min_corner_deg = 70;
    double max_corner_deg = 110;
};

ColorClass classify_color(Rgb mean);
ShapeReading classify_shape(const Region& region, const Frame& frame, const ClassifierConfig& config = {});

struct LineEstimate {
    double lateral_offset = 0;  // [-1,1], positive: line right of centre
    double heading_error = 0;   // degrees, positive: line turns clockwise ahead
    bool visible = false;
    double coverage_fraction = 0;
};

inline constexpr std::size_t kMinBandPixels = 20;

/// Heading from the farthest and nearest image thirds holding at least kMinBandPixels line pixels.
/// expected_line_area: foreground pixels a fully visible line would cover at the current altitude.
LineEstimate estimate_line(const Mask& line_mask, double expected_line_area = 0);

}  // namespace tello
