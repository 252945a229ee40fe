#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "xchess/connect.hpp"
#include "xchess/grid.hpp"
#include "xchess/xcorner.hpp"

namespace xchess {

struct DetectorConfig {
    int min_dimension = 60;
    XCornerConfig xcorner;
    double match_radius = 1.5;
    EdgeConfig edges;
    VoteConfig votes;
    std::optional<Shape> known_shape;
    bool expect_single = false;

    bool operator==(const DetectorConfig& o) const;
};

/// Throws Error when a field is out of its valid range.
void validate_config(const DetectorConfig& config);

/// Parses "RxC" (also "R,C"); throws Error on malformed input.
Shape parse_shape(const std::string& text);

/// Flat "key = value" text, one setting per line, '#' starts a comment. Keys not present
/// keep their defaults; unknown keys are an error.
DetectorConfig parse_config(const std::string& text);
std::string serialize_config(const DetectorConfig& config);

DetectorConfig load_config(const std::filesystem::path& path);

}  // namespace xchess
