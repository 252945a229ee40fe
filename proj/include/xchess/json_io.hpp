#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "xchess/detector.hpp"
#include "xchess/eval.hpp"
#include "xchess/synth.hpp"

namespace xchess {

using Json = nlohmann::ordered_json;

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

/// {"grids":[{"rows":r,"cols":c,"corners":[{"x","y","first_level","selected_level","contrast","orientation"}]}],
///  "runtime_ms":t}
Json detection_to_json(const Detection& detection);
std::vector<DetectedGrid> detections_from_json(const Json& value);

/// {"shape":[r,c],"corners":[[x,y],...]}
Json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const Json& value);

/// A render request: a base scene plus an optional blur sweep. Geometry is given either as
/// "homography" (9 numbers, row-major) or as "quad", the image positions of the four board
/// outline corners in the order top-left, top-right, bottom-right, bottom-left.
struct RenderRequest {
    std::string name = "scene";
    SceneSpec spec;
    std::vector<double> sigmas;
};

RenderRequest render_request_from_json(const Json& value);

Json metrics_to_json(const Metrics& metrics);

}  // namespace xchess
