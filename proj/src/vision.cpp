#include "tello_arena/vision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "tello_arena/geometry.hpp"

namespace tello {

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const double delta = mx - mn;
    Hsv out;
    out.v = mx / 255.0;
    out.s = mx == 0 ? 0.0 : delta / mx;
    if (delta == 0)
        return out;
    double h;
    if (mx == r)
        h = 60.0 * ((g - b) / delta);
    else if (mx == g)
        h = 60.0 * ((b - r) / delta + 2.0);
    else
        h = 60.0 * ((r - g) / delta + 4.0);
    if (h < 0)
        h += 360.0;
    if (h >= 360.0)
        h -= 360.0;
    out.h = h;
    return out;
}

bool HsvRange::contains(const Hsv& p) const
{
    const bool hue_ok = hue_lo <= hue_hi ? (p.h >= hue_lo && p.h <= hue_hi) : (p.h >= hue_lo || p.h <= hue_hi);
    return hue_ok && p.s >= sat_lo && p.s <= sat_hi && p.v >= val_lo && p.v <= val_hi;
}

const char* to_string(ColorClass c)
{
    switch (c) {
    case ColorClass::Red: return "red";
    case ColorClass::Blue: return "blue";
    case ColorClass::Green: return "green";
    case ColorClass::Yellow: return "yellow";
    case ColorClass::Other: return "other";
    }
    return "?";
}

const char* to_string(ShapeClass s)
{
    switch (s) {
    case ShapeClass::Triangle: return "triangle";
    case ShapeClass::Rectangle: return "rectangle";
    case ShapeClass::Circle: return "circle";
    case ShapeClass::Unknown: return "unknown";
    }
    return "?";
}

const HsvRange& ranges::of(ColorClass c)
{
    switch (c) {
    case ColorClass::Red: return kRed;
    case ColorClass::Blue: return kBlue;
    case ColorClass::Green: return kGreen;
    case ColorClass::Yellow: return kYellow;
    case ColorClass::Other: break;
    }
    return kBlack;
}

// ---------------------------------------------------------------- thresholding

Mask in_range(const Frame& frame, const HsvRange& range)
{
    Mask mask(frame.width(), frame.height());
    const auto src = frame.bytes();
    auto dst = mask.bits();
    const long n = static_cast<long>(dst.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        dst[i] = range.contains(rgb_to_hsv(src[3 * i], src[3 * i + 1], src[3 * i + 2])) ? 1 : 0;
    return mask;
}

namespace reference {

Mask in_range(const Frame& frame, const HsvRange& range)
{
    Mask mask(frame.width(), frame.height());
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x)
            mask.set(x, y, range.contains(rgb_to_hsv(frame.at(x, y))));
    return mask;
}

}  // namespace reference

// ---------------------------------------------------------------- morphology

namespace {

enum class Pass { Erode, Dilate };

// One separable 1-D pass along rows (horizontal) or columns, using running counts.
Mask morph_pass(const Mask& in, Pass pass, int r, bool horizontal)
{
    const int w = in.width();
    const int h = in.height();
    Mask out(w, h);
    const int lines = horizontal ? h : w;
    const int len = horizontal ? w : h;
    const int full = 2 * r + 1;
#pragma omp parallel for schedule(static)
    for (int line = 0; line < lines; ++line) {
        std::vector<int> prefix(static_cast<std::size_t>(len) + 1, 0);
        for (int i = 0; i < len; ++i) {
            const bool v = horizontal ? in.at(i, line) : in.at(line, i);
            prefix[i + 1] = prefix[i] + (v ? 1 : 0);
        }
        for (int i = 0; i < len; ++i) {
            const int lo = i - r;
            const int hi = i + r;
            bool v;
            if (pass == Pass::Erode) {
                v = lo >= 0 && hi < len && prefix[hi + 1] - prefix[lo] == full;
            } else {
                const int clo = std::max(lo, 0);
                const int chi = std::min(hi, len - 1);
                v = prefix[chi + 1] - prefix[clo] > 0;
            }
            if (horizontal)
                out.set(i, line, v);
            else
                out.set(line, i, v);
        }
    }
    return out;
}

Mask separable(const Mask& m, Pass pass, int r) { return morph_pass(morph_pass(m, pass, r, true), pass, r, false); }

Mask naive(const Mask& m, Pass pass, int r)
{
    Mask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            bool all = true, any = false;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const bool v = m.get_or(x + dx, y + dy, false);
                    all = all && v;
                    any = any || v;
                }
            }
            out.set(x, y, pass == Pass::Erode ? all : any);
        }
    }
    return out;
}

template <class Kernel>
Mask apply(const Mask& mask, MorphOp op, int radius, Kernel kernel)
{
    if (radius < 1)
        throw std::invalid_argument("morphology radius must be >= 1");
    switch (op) {
    case MorphOp::Erode: return kernel(mask, Pass::Erode, radius);
    case MorphOp::Dilate: return kernel(mask, Pass::Dilate, radius);
    case MorphOp::Open: return kernel(kernel(mask, Pass::Erode, radius), Pass::Dilate, radius);
    case MorphOp::Close: return kernel(kernel(mask, Pass::Dilate, radius), Pass::Erode, radius);
    }
    return mask;
}

}  // namespace

Mask morphology(const Mask& mask, MorphOp op, int radius) { return apply(mask, op, radius, separable); }

namespace reference {
Mask morphology(const Mask& mask, MorphOp op, int radius) { return apply(mask, op, radius, naive); }
}  // namespace reference

// ---------------------------------------------------------------- components

namespace {

// Clockwise in image coordinates (y down), starting north.
constexpr std::array<Pixel, 8> kRing = {
    Pixel{0, -1}, Pixel{1, -1}, Pixel{1, 0}, Pixel{1, 1}, Pixel{0, 1}, Pixel{-1, 1}, Pixel{-1, 0}, Pixel{-1, -1}};

int ring_index(Pixel from, Pixel to)
{
    for (int i = 0; i < 8; ++i)
        if (from.x + kRing[i].x == to.x && from.y + kRing[i].y == to.y)
            return i;
    return -1;
}

std::vector<Pixel> moore_trace(const std::vector<int>& labels, int w, int h, int label, Pixel start)
{
    auto fg = [&](Pixel p) {
        return p.x >= 0 && p.y >= 0 && p.x < w && p.y < h && labels[static_cast<std::size_t>(p.y) * w + p.x] == label;
    };
    std::vector<Pixel> contour{start};
    Pixel p = start;
    Pixel back{start.x - 1, start.y};
    std::optional<Pixel> second;
    const std::size_t guard = static_cast<std::size_t>(w) * h * 4 + 8;
    while (contour.size() < guard) {
        const int k = ring_index(p, back);
        std::optional<Pixel> next;
        for (int i = 1; i <= 8; ++i) {
            const Pixel q{p.x + kRing[(k + i) % 8].x, p.y + kRing[(k + i) % 8].y};
            if (fg(q)) {
                next = q;
                const Pixel prev = kRing[(k + i - 1) % 8];
                back = {p.x + prev.x, p.y + prev.y};
                break;
            }
        }
        if (!next)
            break;  // isolated pixel
        // Jacob's criterion: back at the start and about to repeat the first move.
        if (p == start && second && *next == *second)
            break;
        if (!second)
            second = next;
        p = *next;
        contour.push_back(p);
    }
    if (contour.size() > 1 && contour.back() == start)
        contour.pop_back();
    return contour;
}

}  // namespace

std::vector<Region> connected_components(const Mask& mask)
{
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
    std::vector<Region> regions;
    std::vector<Pixel> stack;
    int next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || labels[static_cast<std::size_t>(y) * w + x] != 0)
                continue;
            Region region;
            region.label = ++next_label;
            region.bbox = {x, y, x, y};
            double sx = 0, sy = 0;
            stack.assign(1, Pixel{x, y});
            labels[static_cast<std::size_t>(y) * w + x] = region.label;
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                region.pixels.push_back(p);
                sx += p.x;
                sy += p.y;
                region.bbox.x0 = std::min(region.bbox.x0, p.x);
                region.bbox.y0 = std::min(region.bbox.y0, p.y);
                region.bbox.x1 = std::max(region.bbox.x1, p.x);
                region.bbox.y1 = std::max(region.bbox.y1, p.y);
                for (const Pixel d : kRing) {
                    const int nx = p.x + d.x, ny = p.y + d.y;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny))
                        continue;
                    int& l = labels[static_cast<std::size_t>(ny) * w + nx];
                    if (l == 0) {
                        l = region.label;
                        stack.push_back({nx, ny});
                    }
                }
            }
            region.area = region.pixels.size();
            region.cx = sx / static_cast<double>(region.area);
            region.cy = sy / static_cast<double>(region.area);
            std::sort(region.pixels.begin(), region.pixels.end(),
                      [](Pixel a, Pixel b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
            regions.push_back(std::move(region));
        }
    }
    for (Region& r : regions)
        r.contour = moore_trace(labels, w, h, r.label, r.pixels.front());
    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) { return a.area > b.area; });
    return regions;
}

double contour_perimeter(const std::vector<Pixel>& contour)
{
    if (contour.size() < 2)
        return 0;
    double total = 0;
    for (std::size_t i = 0; i < contour.size(); ++i) {
        const Pixel a = contour[i];
        const Pixel b = contour[(i + 1) % contour.size()];
        total += (a.x != b.x && a.y != b.y) ? std::numbers::sqrt2 : (a == b ? 0.0 : 1.0);
    }
    return total;
}

// ---------------------------------------------------------------- polygons

namespace {

double segment_distance(Pixel p, Pixel a, Pixel b)
{
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0)
        return std::hypot(p.x - a.x, p.y - a.y);
    const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

// Keeps the interior points of chain[lo..hi] needed for an epsilon approximation.
void rdp(const std::vector<Pixel>& chain, std::size_t lo, std::size_t hi, double eps, std::vector<char>& keep)
{
    if (hi <= lo + 1)
        return;
    double best = -1;
    std::size_t idx = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const double d = segment_distance(chain[i], chain[lo], chain[hi]);
        if (d > best) {
            best = d;
            idx = i;
        }
    }
    if (best > eps) {
        keep[idx] = 1;
        rdp(chain, lo, idx, eps, keep);
        rdp(chain, idx, hi, eps, keep);
    }
}

}  // namespace

std::vector<Pixel> approx_polygon(const std::vector<Pixel>& contour, double epsilon)
{
    if (!(epsilon > 0))
        throw std::invalid_argument("epsilon must be positive");
    if (contour.size() < 4)
        throw DegenerateContour("contour has fewer than 4 boundary pixels");
    const std::size_t n = contour.size();
    std::size_t ia = 0, ib = 0;
    long best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const long dx = contour[i].x - contour[j].x;
            const long dy = contour[i].y - contour[j].y;
            const long d2 = dx * dx + dy * dy;
            if (d2 > best) {
                best = d2;
                ia = i;
                ib = j;
            }
        }
    }
    // Rotate so the loop starts at ia; it then reads ia..ib..(back to ia).
    std::vector<Pixel> loop;
    loop.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        loop.push_back(contour[(ia + k) % n]);
    const std::size_t mid = ib - ia;
    std::vector<char> keep(loop.size(), 0);
    keep[0] = keep[mid] = 1;
    rdp(loop, 0, mid, epsilon, keep);
    rdp(loop, mid, n, epsilon, keep);
    std::vector<Pixel> out;
    for (std::size_t k = 0; k < n; ++k)
        if (keep[k])
            out.push_back(loop[k]);
    return out;
}

// ---------------------------------------------------------------- classification

ColorClass classify_color(Rgb mean)
{
    const Hsv hsv = rgb_to_hsv(mean);
    for (ColorClass c : {ColorClass::Red, ColorClass::Blue, ColorClass::Green, ColorClass::Yellow})
        if (ranges::of(c).contains(hsv))
            return c;
    return ColorClass::Other;
}

std::vector<Pixel> merge_short_edges(std::vector<Pixel> poly, double min_length)
{
    while (poly.size() > 3) {
        std::size_t shortest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Pixel a = poly[i];
            const Pixel b = poly[(i + 1) % poly.size()];
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            if (len < best) {
                best = len;
                shortest = i;
            }
        }
        if (best >= min_length)
            break;
        const std::size_t next = (shortest + 1) % poly.size();
        const Pixel a = poly[shortest];
        const Pixel b = poly[next];
        poly[shortest] = {static_cast<int>(std::floor((a.x + b.x) / 2.0)), static_cast<int>(std::floor((a.y + b.y) / 2.0))};
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(next));
    }
    return poly;
}

ShapeReading classify_shape(const Region& region, const Frame& frame, const ClassifierConfig& config)
{
    ShapeReading out;
    out.cx = region.cx;
    out.cy = region.cy;
    out.area = region.area;

    double r = 0, g = 0, b = 0;
    for (const Pixel p : region.pixels) {
        const Rgb c = frame.at(p.x, p.y);
        r += c.r;
        g += c.g;
        b += c.b;
    }
    if (region.area > 0) {
        const double n = static_cast<double>(region.area);
        out.color = classify_color({static_cast<std::uint8_t>(std::lround(r / n)),
                                    static_cast<std::uint8_t>(std::lround(g / n)),
                                    static_cast<std::uint8_t>(std::lround(b / n))});
    }

    const double perimeter = contour_perimeter(region.contour);
    if (perimeter <= 0)
        return out;
    out.circularity = std::min(1.1, 4.0 * std::numbers::pi * static_cast<double>(region.area) / (perimeter * perimeter));
    if (region.area < config.min_area || region.contour.size() < 4)
        return out;

    const auto poly = merge_short_edges(approx_polygon(region.contour, config.epsilon_fraction * perimeter),
                                        config.min_edge_fraction * perimeter);
    out.vertex_count = static_cast<int>(poly.size());
    const bool round = out.circularity >= config.circularity_threshold;

    auto corners_square = [&]() {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Pixel prev = poly[(i + poly.size() - 1) % poly.size()];
            const Pixel cur = poly[i];
            const Pixel next = poly[(i + 1) % poly.size()];
            const double ax = prev.x - cur.x, ay = prev.y - cur.y;
            const double bx = next.x - cur.x, by = next.y - cur.y;
            const double cosang = (ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by));
            const double ang = std::acos(std::clamp(cosang, -1.0, 1.0)) * kRadToDeg;
            if (ang < config.min_corner_deg || ang > config.max_corner_deg)
                return false;
        }
        return true;
    };

    if (out.vertex_count >= 6 && round)
        out.shape = ShapeClass::Circle;
    else if (out.vertex_count == 3)
        out.shape = ShapeClass::Triangle;
    else if (out.vertex_count == 4 && corners_square())
        out.shape = ShapeClass::Rectangle;
    else if (round)
        out.shape = ShapeClass::Circle;
    return out;
}

// ---------------------------------------------------------------- line

LineEstimate estimate_line(const Mask& mask, double expected_line_area)
{
    const int w = mask.width();
    const int h = mask.height();
    struct Acc {
        double sx = 0, sy = 0;
        std::size_t n = 0;
        void add(int x, int y)
        {
            sx += x + 0.5;
            sy += y + 0.5;
            ++n;
        }
    };
    std::array<Acc, 3> bands;  // top, middle, bottom thirds
    Acc all;
    for (int y = 0; y < h; ++y) {
        const int b = std::min(2, 3 * y / std::max(1, h));
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y))
                continue;
            all.add(x, y);
            bands[b].add(x, y);
        }
    }
    LineEstimate est;
    if (expected_line_area > 0)
        est.coverage_fraction = std::clamp(static_cast<double>(all.n) / expected_line_area, 0.0, 1.0);
    int far = -1, near = -1;
    for (int b = 0; b < 3; ++b) {
        if (bands[b].n < kMinBandPixels)
            continue;
        if (far < 0)
            far = b;
        near = b;
    }
    if (far < 0 || far == near)
        return est;
    est.visible = true;
    const Acc& top = bands[far];
    const Acc& bottom = bands[near];
    // The middle third holds the point below the drone; fall back to every line pixel.
    const Acc& centre = bands[1].n >= kMinBandPixels ? bands[1] : all;
    const double cx = centre.sx / static_cast<double>(centre.n);
    est.lateral_offset = std::clamp((cx - w / 2.0) / (w / 2.0), -1.0, 1.0);
    const double dx = top.sx / static_cast<double>(top.n) - bottom.sx / static_cast<double>(bottom.n);
    const double dy = bottom.sy / static_cast<double>(bottom.n) - top.sy / static_cast<double>(top.n);
    est.heading_error = std::atan2(dx, dy) * kRadToDeg;
    return est;
}

}  // namespace tello
