#pragma once

#include <array>
#include <functional>
#include <vector>

#include "xchess/image.hpp"

namespace xchess {

/// Eight sub-pixel offsets on a circle. Index k sits at angle k*45 degrees; the axis
/// samples (a,b,c,d) are k = 0,2,4,6 and the diagonal samples (e,f,g,h) are k = 1,3,5,7,
/// so opposite samples are point reflections through the centre.
struct SampleRing {
    double radius = 3.0;
    std::array<Point2d, 8> offsets{};

    static SampleRing make(double radius = 3.0);

    Point2d axis(int i) const { return offsets[2 * i]; }
    Point2d diagonal(int i) const { return offsets[2 * i + 1]; }
};

/// (v1-mu)(v3-mu) + (v2-mu)(v4-mu) with mu the mean of the four inputs.
inline double xscore(double v1, double v2, double v3, double v4) {
    const double mu = 0.25 * (v1 + v2 + v3 + v4);
    return (v1 - mu) * (v3 - mu) + (v2 - mu) * (v4 - mu);
}

/// Per-pixel max(xscore(a,b,c,d), xscore(e,f,g,h)) with bilinear ring samples on a
/// blurred image. Borders are edge replicated.
RealRaster corner_intensity(const GrayImage& blurred, const SampleRing& ring);

/// Integer peak plus its location in level pixel coordinates.
struct Peak {
    int ix = 0;
    int iy = 0;
    double x = 0.0;  // ix + 0.5
    double y = 0.0;  // iy + 0.5
    float value = 0.0f;
};

/// Pixels of a box-filtered intensity raster strictly greater than every other pixel
/// within `radius` (Chebyshev) and strictly greater than `floor`. Peak coordinates carry
/// the half pixel shift introduced by box_filter_2x2.
std::vector<Peak> nonmax_suppress(const RealRaster& filtered, int radius, float floor);

struct CascadeConfig {
    double rel_threshold = 0.02;
    /// Square ring of raw responses around the peak; x-corners are surrounded by negative
    /// responses. The ring has side 2 * pos_radius.
    int pos_radius = 4;
    /// Maximum positive responses tolerated on that ring.
    int pos_max = 12;
    /// A response counts as positive above pos_rel_level * peak value.
    double pos_rel_level = 0.05;
    double circle_radius = 3.0;
    int circle_samples = 16;
    int eig_radius = 2;
    /// Minimum structure tensor eigenvalue, relative to the top level maximum so that the
    /// test scales with contrast like the intensity itself.
    double eig_threshold = 0.001;
};

/// Raw responses above `level` on the square ring of side 2 * radius centred on the peak.
int positive_neighbors(const RealRaster& raw, const Peak& peak, int radius, float level);

enum class CascadeStage { passed, intensity, positive_count, gray_pattern, eigenvalue };

/// Runs the four-stage candidate filter on one peak and reports the first stage that
/// rejected it, or `passed`.
CascadeStage cascade_check(const Peak& peak, const RealRaster& raw, const GrayImage& blurred,
                           float top_level_max, const CascadeConfig& config);

std::vector<Peak> filter_cascade(const std::vector<Peak>& peaks, const RealRaster& raw,
                                 const GrayImage& blurred, float top_level_max, const CascadeConfig& config);

/// Number of cyclic sign changes of a circle of gray samples thresholded at their mean.
int gray_pattern_transitions(const GrayImage& blurred, Point2d center, double radius, int samples);

/// Smaller eigenvalue of the gradient structure tensor summed over a (2r+1)^2 window.
double min_structure_eigenvalue(const GrayImage& blurred, int cx, int cy, int radius);

struct MeanShiftConfig {
    int window = 2;
    int max_iterations = 10;
    double tolerance = 1e-3;
};

/// A real function of sub-pixel position.
using IntensityField = std::function<double(Point2d)>;

/// Weighted centroid of max(intensity,0) sampled on the (2w+1)^2 lattice of offsets around
/// `center`. Returns `center` when all weights vanish.
Point2d weighted_centroid(const IntensityField& intensity, Point2d center, int window);
Point2d weighted_centroid(const RealRaster& intensity, Point2d center, int window);

/// Mean-shift iteration of weighted_centroid starting at `seed`. Displacement from the seed
/// is capped at `window` pixels.
Point2d meanshift_refine(const IntensityField& intensity, Point2d seed, const MeanShiftConfig& config = {});
Point2d meanshift_refine(const RealRaster& intensity, Point2d seed, const MeanShiftConfig& config = {});

/// The x-corner response evaluated directly at a sub-pixel position.
double corner_intensity_at(const GrayImage& blurred, const SampleRing& ring, Point2d p);

struct SpokeConfig {
    int spokes = 32;
    double length = 4.0;
    int samples = 4;
    /// Gaussian smoothing of the orientation bins, in bins.
    double smoothing_sigma = 2.0;
};

struct SpokeResult {
    /// Edge direction in [-pi/2, pi/2): the light sector spans [orientation, orientation + pi/2].
    double orientation = 0.0;
    /// Smoothed peak of the folded spoke score.
    double intensity = 0.0;
    /// Light minus dark spoke mean at the selected orientation, clamped at 0.
    double contrast = 0.0;
};

/// Orientation, rotation invariant intensity and contrast from radial line integrals.
SpokeResult spoke_orientation(const GrayImage& blurred, Point2d location, const SpokeConfig& config = {});

/// Wraps an angle into [-pi/2, pi/2).
double wrap_half_pi(double angle);

struct CornerCandidate {
    double x = 0.0;  // level pixel coordinates
    double y = 0.0;
    int level = 0;
    double intensity_raw = 0.0;
    double intensity_spoke = 0.0;
    double orientation = 0.0;
    double contrast = 0.0;
};

struct XCornerConfig {
    double ring_radius = 3.0;
    int nms_radius = 2;
    CascadeConfig cascade;
    MeanShiftConfig meanshift;
    SpokeConfig spokes;
};

/// Everything the per-level detector produces; the rasters are kept for diagnostics.
struct LevelResponse {
    GrayImage blurred;
    RealRaster raw;
    RealRaster filtered;
};

LevelResponse compute_level_response(const GrayImage& level_image, const XCornerConfig& config);

/// Runs NMS, the cascade, mean-shift and the spoke estimator on one pyramid level.
std::vector<CornerCandidate> detect_level_corners(const LevelResponse& response, int level, float top_level_max,
                                                  const XCornerConfig& config);

}  // namespace xchess
