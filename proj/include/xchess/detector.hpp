#pragma once

#include <vector>

#include "xchess/config.hpp"
#include "xchess/connect.hpp"
#include "xchess/grid.hpp"
#include "xchess/scalesel.hpp"

namespace xchess {

struct DetectedCorner {
    /// Sub-pixel location; pixel (i,j) covers [i, i+1) x [j, j+1).
    Point2d location;
    int first_level = 0;
    int selected_level = 0;
    double contrast = 0.0;
    double orientation = 0.0;
    /// Index into Detection::tracks.
    int track = -1;
};

struct GridResult {
    int rows = 0;
    int cols = 0;
    std::vector<DetectedCorner> corners;  // row-major canonical order
};

struct Detection {
    std::vector<GridResult> grids;
    /// Intermediate products, in full resolution pixel-index coordinates.
    std::vector<CornerTrack> tracks;
    std::vector<EdgeCandidate> edges;
    CornerGraph graph;
    int pyramid_levels = 0;
    double runtime_ms = 0.0;
};

class Detector {
public:
    explicit Detector(DetectorConfig config = {});

    const DetectorConfig& config() const { return config_; }

    /// Full pipeline on a normalized gray image. runtime_ms covers this call only.
    Detection detect(const GrayImage& image) const;

private:
    DetectorConfig config_;
};

}  // namespace xchess
