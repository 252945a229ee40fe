#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace xchess {

/// Thrown for malformed inputs (bad dimensions, unsupported formats, ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a file cannot be read, decoded or written.
class IoError : public Error {
public:
    using Error::Error;
};

struct Point2d {
    double x = 0.0;
    double y = 0.0;

    friend Point2d operator+(Point2d a, Point2d b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2d operator-(Point2d a, Point2d b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2d operator*(double s, Point2d a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2d a, Point2d b) = default;

    double norm() const { return std::hypot(x, y); }
};

inline double distance(Point2d a, Point2d b) { return (a - b).norm(); }
inline double cross(Point2d a, Point2d b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2d a, Point2d b) { return a.x * b.x + a.y * b.y; }

/// Row-major single channel raster.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height),
          pixels_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {
        if (width < 0 || height < 0) throw Error("negative raster size");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }
    size_t size() const { return pixels_.size(); }

    T& operator()(int x, int y) { return pixels_[index(x, y)]; }
    const T& operator()(int x, int y) const { return pixels_[index(x, y)]; }

    /// Edge-replicated access.
    T clamped(int x, int y) const {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return pixels_[index(x, y)];
    }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T* row(int y) { return pixels_.data() + static_cast<size_t>(y) * width_; }
    const T* row(int y) const { return pixels_.data() + static_cast<size_t>(y) * width_; }

    std::span<T> pixels() { return pixels_; }
    std::span<const T> pixels() const { return pixels_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    size_t index(int x, int y) const {
        return static_cast<size_t>(y) * static_cast<size_t>(width_) + static_cast<size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> pixels_;
};

/// Normalized intensity image, every value in [0,1].
using GrayImage = Raster<float>;
/// Signed real-valued raster (x-corner intensity and friends).
using RealRaster = Raster<float>;

/// Bilinear interpolation with edge replication. Pixel (i,j) is sampled at (i,j).
template <typename T>
double sample_bilinear(const Raster<T>& img, double x, double y) {
    const double maxx = img.width() - 1;
    const double maxy = img.height() - 1;
    x = x < 0 ? 0 : (x > maxx ? maxx : x);
    y = y < 0 ? 0 : (y > maxy ? maxy : y);
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    const double fx = x - x0;
    const double fy = y - y0;
    const int x1 = x0 + 1 < img.width() ? x0 + 1 : x0;
    const int y1 = y0 + 1 < img.height() ? y0 + 1 : y0;
    const double top = img(x0, y0) + fx * (img(x1, y0) - img(x0, y0));
    const double bottom = img(x0, y1) + fx * (img(x1, y1) - img(x0, y1));
    return top + fy * (bottom - top);
}

/// Interleaved integer raster as decoded from a file.
struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    int bit_depth = 8;
    std::vector<uint16_t> samples;
};

/// Collapses channels by unweighted mean and scales into [0,1].
GrayImage to_gray_normalized(const RawImage& raw);

/// Separable [1,2,1]/4 smoothing, edge replicated.
GrayImage gaussian_blur_3x3(const GrayImage& img);

/// out(x,y) = mean of the 2x2 block with top-left (x,y). The maximum of the output at
/// integer (x,y) corresponds to location (x+0.5, y+0.5) in the input.
RealRaster box_filter_2x2(const RealRaster& in);

/// Non-overlapping 2x2 block average; output is floor(w/2) x floor(h/2).
GrayImage downsample_2x2(const GrayImage& img);

struct Pyramid {
    std::vector<GrayImage> levels;
    int min_dimension = 60;
};

/// Dyadic pyramid. Level 0 is the input. Halving stops before min(w,h) would drop
/// below min_dimension.
Pyramid build_pyramid(const GrayImage& img, int min_dimension = 60);

/// Maps a level-k pixel coordinate to full resolution.
inline Point2d level_to_full(Point2d p, int level) {
    const double s = std::ldexp(1.0, level);
    return {s * (p.x + 0.5) - 0.5, s * (p.y + 0.5) - 0.5};
}

inline Point2d full_to_level(Point2d p, int level) {
    const double s = std::ldexp(1.0, -level);
    return {s * (p.x + 0.5) - 0.5, s * (p.y + 0.5) - 0.5};
}

}  // namespace xchess
