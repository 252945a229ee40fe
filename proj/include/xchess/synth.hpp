#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "xchess/image.hpp"

namespace xchess {

/// Row-major 3x3 projective map.
struct Homography {
    std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

    Point2d apply(Point2d p) const;
    /// Denominator of the projective map at p; positive in front of the camera.
    double depth(Point2d p) const { return h[6] * p.x + h[7] * p.y + h[8]; }
    double determinant() const;
    Homography inverse() const;
    Homography operator*(const Homography& o) const;

    static Homography translation(double tx, double ty);
    /// The map taking src[k] to dst[k] for four points in general position.
    static Homography from_quad(const std::array<Point2d, 4>& src, const std::array<Point2d, 4>& dst);
};

/// Board plane coordinates: square (r,c) spans origin + [c*s, (c+1)*s] x [r*s, (r+1)*s].
/// Image coordinates follow the convention used for every reported location in this
/// library: pixel (i,j) covers [i, i+1) x [j, j+1).
struct SceneSpec {
    int squares_rows = 5;
    int squares_cols = 6;
    double square_size = 20.0;
    Point2d origin{40.0, 40.0};
    Homography homography;
    double blur_sigma = 0.0;
    double noise_sigma = 0.0;
    /// Colour of square (0,0) and every square of equal parity.
    double fg = 0.0;
    /// Colour of the other squares and of everything outside the board.
    double bg = 1.0;
    int width = 320;
    int height = 240;
    int supersample = 4;
    uint64_t seed = 0;
};

struct GroundTruth {
    int rows = 0;  // inner corners, squares_rows - 1
    int cols = 0;  // squares_cols - 1
    std::vector<Point2d> corners;  // row-major
};

struct Scene {
    GrayImage image;
    GroundTruth truth;
};

/// Throws Error for invalid specs or boards not fully inside the image.
void validate_scene(const SceneSpec& spec);

GroundTruth scene_ground_truth(const SceneSpec& spec);

/// Supersampled coverage render, then Gaussian blur, then seeded noise, clamped to [0,1].
Scene render(const SceneSpec& spec);

/// One scene per sigma sharing geometry and seed.
std::vector<Scene> blur_sweep(const SceneSpec& spec, const std::vector<double>& sigmas);

/// Separable Gaussian with radius ceil(3 sigma), edge replicated. sigma <= 0 is identity.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

}  // namespace xchess
