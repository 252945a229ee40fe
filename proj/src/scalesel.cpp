#include "xchess/scalesel.hpp"

#include <algorithm>
#include <tuple>

namespace xchess {

namespace {

Point2d projected(const CornerCandidate& c) { return level_to_full({c.x, c.y}, c.level); }

}  // namespace

std::vector<CornerTrack> associate_levels(const std::vector<std::vector<CornerCandidate>>& per_level,
                                          double match_radius) {
    std::vector<CornerTrack> tracks;
    for (size_t level = 0; level < per_level.size(); ++level) {
        const auto& cands = per_level[level];
        const double radius = match_radius * std::ldexp(1.0, static_cast<int>(level));

        // All (distance, candidate, track) pairs within the radius, resolved nearest first.
        std::vector<std::tuple<double, size_t, size_t>> pairs;
        const size_t existing = tracks.size();
        for (size_t ci = 0; ci < cands.size(); ++ci) {
            const Point2d p = projected(cands[ci]);
            for (size_t ti = 0; ti < existing; ++ti) {
                const CornerCandidate& head = tracks[ti].members.back();
                const double d = distance(p, projected(head));
                if (d <= radius) pairs.emplace_back(d, ci, ti);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<char> cand_used(cands.size(), 0);
        std::vector<char> track_used(existing, 0);
        for (const auto& [d, ci, ti] : pairs) {
            if (cand_used[ci] || track_used[ti]) continue;
            cand_used[ci] = track_used[ti] = 1;
            tracks[ti].members.push_back(cands[ci]);
        }
        for (size_t ci = 0; ci < cands.size(); ++ci) {
            if (cand_used[ci]) continue;
            CornerTrack t;
            t.members.push_back(cands[ci]);
            tracks.push_back(std::move(t));
        }
    }
    for (CornerTrack& t : tracks) finalize_track(t);
    return tracks;
}

int select_level(const CornerTrack& track) {
    if (track.members.empty()) throw Error("select_level on an empty track");
    const CornerCandidate* best = nullptr;
    double best_score = 0;
    for (const CornerCandidate& c : track.members) {
        const double score = c.intensity_spoke / (c.level + 1);
        if (!best || score > best_score || (score == best_score && c.level < best->level)) {
            best = &c;
            best_score = score;
        }
    }
    return best->level;
}

void finalize_track(CornerTrack& track) {
    if (track.members.empty()) throw Error("finalize_track on an empty track");
    std::sort(track.members.begin(), track.members.end(),
              [](const CornerCandidate& a, const CornerCandidate& b) { return a.level < b.level; });
    track.first_level = track.members.front().level;
    track.last_level = track.members.back().level;
    track.selected_level = select_level(track);
    for (const CornerCandidate& c : track.members) {
        if (c.level != track.selected_level) continue;
        track.location = projected(c);
        track.orientation = c.orientation;
        track.intensity = c.intensity_spoke;
        track.contrast = c.contrast;
    }
}

}  // namespace xchess
