#include "xchess/overlay.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace xchess {

namespace {

using Rgb = std::array<uint16_t, 3>;

struct Canvas {
    RawImage img;

    void put(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
        const size_t i = 3 * (static_cast<size_t>(y) * img.width + x);
        for (int k = 0; k < 3; ++k) img.samples[i + k] = c[k];
    }

    // Endpoints in pixel-index coordinates.
    void line(Point2d a, Point2d b, Rgb c) {
        const int steps = std::max(1, static_cast<int>(std::ceil(distance(a, b) * 2)));
        for (int s = 0; s <= steps; ++s) {
            const Point2d p = a + (static_cast<double>(s) / steps) * (b - a);
            put(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)), c);
        }
    }

    void cross_mark(Point2d p, int r, Rgb c) {
        line(p - Point2d{double(r), double(r)}, p + Point2d{double(r), double(r)}, c);
        line(p + Point2d{-double(r), double(r)}, p + Point2d{double(r), -double(r)}, c);
    }
};

}  // namespace

RawImage render_overlay(const GrayImage& image, const Detection& det) {
    Canvas cv;
    cv.img.width = image.width();
    cv.img.height = image.height();
    cv.img.channels = 3;
    cv.img.bit_depth = 8;
    cv.img.samples.resize(static_cast<size_t>(image.width()) * image.height() * 3);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            const auto v = static_cast<uint16_t>(std::lround(std::clamp(image(x, y), 0.0f, 1.0f) * 255.0f));
            cv.put(x, y, {v, v, v});
        }

    const CornerGraph& g = det.graph;
    for (int a = 0; a < g.size(); ++a)
        for (const Link& l : g.links(a))
            if (l.to > a) cv.line(g.position(a), g.position(l.to), {0, 200, 0});
    for (const CornerTrack& t : det.tracks)
        cv.put(static_cast<int>(std::lround(t.location.x)), static_cast<int>(std::lround(t.location.y)), {40, 80, 255});
    for (const GridResult& grid : det.grids) {
        for (size_t i = 0; i < grid.corners.size(); ++i) {
            const Point2d p = grid.corners[i].location - Point2d{0.5, 0.5};
            cv.cross_mark(p, 3, i == 0 ? Rgb{255, 220, 0} : Rgb{255, 0, 0});
        }
    }
    return cv.img;
}

}  // namespace xchess
