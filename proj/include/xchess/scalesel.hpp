#pragma once

#include <vector>

#include "xchess/xcorner.hpp"

namespace xchess {

/// One physical corner observed across pyramid levels.
struct CornerTrack {
    /// Sorted by level, at most one member per level.
    std::vector<CornerCandidate> members;
    int first_level = 0;
    int last_level = 0;
    int selected_level = 0;
    /// Full resolution pixel-index coordinates of the selected member.
    Point2d location;
    double orientation = 0.0;
    double intensity = 0.0;
    double contrast = 0.0;
};

/// Greedy association from level 0 upward. A level k+1 candidate joins the track whose
/// head lies within match_radius * 2^(k+1) full-resolution pixels, nearest pairs first.
std::vector<CornerTrack> associate_levels(const std::vector<std::vector<CornerCandidate>>& per_level,
                                          double match_radius = 1.5);

/// argmax over members of intensity_spoke / (level + 1), ties to the lower level.
int select_level(const CornerTrack& track);

/// Fills first/last/selected level and the selected member's location and attributes.
void finalize_track(CornerTrack& track);

}  // namespace xchess
