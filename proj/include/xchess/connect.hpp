#pragma once

#include <optional>
#include <span>
#include <vector>

#include "xchess/image.hpp"

namespace xchess {

struct EdgeConfig {
    int k_neighbors = 8;
    double perp_tolerance = 0.3;
    /// Longitudinal sample positions per edge.
    int samples_n = 7;
    /// Skip zone around a corner is skip_scale * 2^level pixels.
    double skip_scale = 2.0;
    /// Lateral offset is lateral_fraction * length clamped to [lateral_min, lateral_max].
    double lateral_fraction = 0.1;
    double lateral_min = 1.0;
    double lateral_max = 6.0;
    double keep_fraction = 0.75;
    double edge_threshold = 0.05;
    double min_contrast_sum = 1e-6;
};

/// What the connectivity stage needs to know about a corner.
struct ConnectCorner {
    Point2d location;  // full resolution pixel-index coordinates
    double orientation = 0.0;
    double contrast = 0.0;
    int selected_level = 0;
    /// Highest pyramid level the corner was observed in.
    int last_level = 0;
};

/// The k nearest corners (Euclidean, ties by index) that are visible at or above the
/// query's selected level, i.e. last_level >= query.selected_level.
std::vector<int> knn_candidates(int query, std::span<const ConnectCorner> corners, int k);

/// Angular distance between two pi-periodic orientations, in [0, pi/2].
double orientation_distance(double a, double b);

/// True iff the orientations are within `tolerance` of perpendicular.
bool orientation_compatible(double a, double b, double tolerance);

/// Lateral intensity pairs along an edge. side_a[k] and side_b[k] straddle the segment at
/// longitudinal position k.
struct EdgeSamples {
    std::vector<double> side_a;
    std::vector<double> side_b;
};

/// Samples the blurred full-resolution image between two corners, skipping the blur zone
/// of each. nullopt if the skip zones overlap.
std::optional<EdgeSamples> sample_edge(const GrayImage& blurred, const ConnectCorner& ci, const ConnectCorner& cj,
                                       const EdgeConfig& config);

/// Number of per-position terms retained by the n-best rule.
int kept_terms(int positions, double keep_fraction);

/// Mean of the best per-position (E_perp - E_par) terms divided by the contrast sum.
double score_samples(const EdgeSamples& samples, double contrast_sum, const EdgeConfig& config);

/// 0 when the skip zones overlap or the contrast sum is degenerate.
double edge_score(const GrayImage& blurred, const ConnectCorner& ci, const ConnectCorner& cj,
                  const EdgeConfig& config);

struct EdgeCandidate {
    int from = -1;
    int to = -1;
    double length = 0.0;
    double score = 0.0;
    bool accepted = false;
};

EdgeCandidate validate_connection(const GrayImage& blurred, std::span<const ConnectCorner> corners, int i, int j,
                                  const EdgeConfig& config);

/// Directed connections i -> j for every corner i and each of its KNN candidates j passing
/// the orientation gate. Rejected candidates are included with accepted = false. Sorted by
/// (from, to).
std::vector<EdgeCandidate> connect_corners(const GrayImage& blurred, std::span<const ConnectCorner> corners,
                                           const EdgeConfig& config);

}  // namespace xchess
