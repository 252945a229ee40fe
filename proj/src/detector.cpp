#include "xchess/detector.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>

namespace xchess {

Detector::Detector(DetectorConfig config) : config_(std::move(config)) { validate_config(config_); }

Detection Detector::detect(const GrayImage& image) const {
    const auto start = std::chrono::steady_clock::now();
    Detection det;
    if (image.empty()) throw Error("detect: empty image");

    const Pyramid pyr = build_pyramid(image, config_.min_dimension);
    det.pyramid_levels = static_cast<int>(pyr.levels.size());

    std::vector<LevelResponse> responses;
    responses.reserve(pyr.levels.size());
    for (const GrayImage& level : pyr.levels) responses.push_back(compute_level_response(level, config_.xcorner));

    const auto& top = responses.back().filtered.pixels();
    const float top_max = top.empty() ? 0.0f : *std::max_element(top.begin(), top.end());

    std::vector<std::vector<CornerCandidate>> per_level;
    if (top_max > 0) {
        for (size_t k = 0; k < responses.size(); ++k)
            per_level.push_back(detect_level_corners(responses[k], static_cast<int>(k), top_max, config_.xcorner));
    }
    det.tracks = associate_levels(per_level, config_.match_radius);

    std::vector<ConnectCorner> cc;
    std::vector<Point2d> positions;
    std::vector<double> orientations;
    for (const CornerTrack& t : det.tracks) {
        cc.push_back({t.location, t.orientation, t.contrast, t.selected_level, t.last_level});
        positions.push_back(t.location);
        orientations.push_back(t.orientation);
    }
    det.edges = connect_corners(responses.front().blurred, cc, config_.edges);

    CornerGraph graph = CornerGraph::from_edges(positions, orientations, det.edges);
    graph = drop_spanning_links(std::move(graph));
    graph = resolve_votes(std::move(graph), config_.votes);
    graph = prune_constraints(std::move(graph));

    const auto lattices =
        enforce_single_grid(assign_lattices(graph), graph, config_.known_shape, config_.expect_single);
    for (const Lattice& lat : lattices) {
        const auto board = to_chessboard(lat, graph);
        if (!board) continue;
        GridResult g;
        g.rows = board->rows;
        g.cols = board->cols;
        for (int node : board->nodes) {
            const CornerTrack& t = det.tracks[node];
            g.corners.push_back({t.location + Point2d{0.5, 0.5}, t.first_level, t.selected_level, t.contrast,
                                 t.orientation, node});
        }
        det.grids.push_back(std::move(g));
    }
    std::sort(det.grids.begin(), det.grids.end(), [](const GridResult& a, const GridResult& b) {
        const size_t na = a.corners.size(), nb = b.corners.size();
        if (na != nb) return na > nb;
        const Point2d pa = a.corners.front().location, pb = b.corners.front().location;
        return std::tie(pa.x, pa.y) < std::tie(pb.x, pb.y);
    });
    det.graph = std::move(graph);
    det.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return det;
}

}  // namespace xchess
