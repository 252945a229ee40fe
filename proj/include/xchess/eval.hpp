#pragma once

#include <optional>
#include <vector>

#include "xchess/image.hpp"
#include "xchess/synth.hpp"

namespace xchess {

/// A detected board as scored by the evaluator: shape plus row-major corners.
struct DetectedGrid {
    int rows = 0;
    int cols = 0;
    std::vector<Point2d> corners;
};

struct ClassifyOptions {
    double t_c = 5.0;
    /// Match by the best lattice symmetry (a bijection) instead of nearest truth corner.
    bool strict = false;
    /// Shift truth by (0.5, 0.5) when it uses the pixel-centre-at-integer convention.
    bool half_pixel = false;
};

struct ImageOutcome {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    /// Per-corner errors of true-positive detections.
    std::vector<double> errors;
};

/// Scores the detections of one image. Detections of the wrong shape are ignored; an image
/// with neither a TP nor an FP counts one FN.
ImageOutcome classify(const std::vector<DetectedGrid>& detections, const GroundTruth& truth,
                      const ClassifyOptions& options = {});

double f1(int tp, int fp, int fn);

struct Quantiles {
    double q50 = 0.0;
    double q100 = 0.0;
};

/// Lower median and maximum; nullopt for an empty list.
std::optional<Quantiles> quantiles(std::vector<double> values);

struct Metrics {
    int n_images = 0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double f1 = 0.0;
    std::optional<double> e50, e100;
    std::optional<double> r50, r100;
};

/// Pools per-corner TP errors across images; runtimes may be empty.
Metrics summarize(const std::vector<ImageOutcome>& outcomes, const std::vector<double>& runtimes_ms = {});

}  // namespace xchess
