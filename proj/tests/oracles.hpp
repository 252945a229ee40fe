#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "xchess/detector.hpp"

namespace xchess::testing {

// Independent check of the three grid rules on the final corner graph, restricted to the
// corners of each emitted grid, plus agreement between graph and lattice adjacency.
inline std::vector<std::string> verify_grid_rules(const Detection& det) {
    std::vector<std::string> bad;
    const CornerGraph& g = det.graph;
    auto neighbours = [&](int n) {
        std::set<int> s;
        for (const Link& l : g.links(n)) s.insert(l.to);
        return s;
    };
    auto heading = [&](int from, int to) {
        const Point2d d = g.position(to) - g.position(from);
        return std::atan2(d.y, d.x);
    };
    for (size_t gi = 0; gi < det.grids.size(); ++gi) {
        const GridResult& grid = det.grids[gi];
        const std::string tag = "grid " + std::to_string(gi) + ": ";
        if (grid.rows < 2 || grid.cols < 2 || static_cast<int>(grid.corners.size()) != grid.rows * grid.cols) {
            bad.push_back(tag + "bad shape");
            continue;
        }
        std::vector<int> ids;
        for (const DetectedCorner& c : grid.corners) ids.push_back(c.track);
        const std::set<int> members(ids.begin(), ids.end());
        if (members.size() != ids.size()) bad.push_back(tag + "repeated corner");

        for (int c : ids) {
            const std::set<int> nb = neighbours(c);
            for (int n : nb)
                if (!neighbours(n).count(c)) bad.push_back(tag + "non-mutual link");
            const int deg = static_cast<int>(nb.size());
            if (deg < 2 || deg > 4) bad.push_back(tag + "degree " + std::to_string(deg));

            // Two neighbours are adjacent when the smaller wedge between them is under 135
            // degrees and holds no third neighbour.
            const std::vector<int> v(nb.begin(), nb.end());
            for (size_t i = 0; i < v.size(); ++i) {
                for (size_t j = i + 1; j < v.size(); ++j) {
                    const double ai = heading(c, v[i]), aj = heading(c, v[j]);
                    double wedge = std::fmod(aj - ai + 4 * std::numbers::pi, 2 * std::numbers::pi);
                    double start = ai;
                    if (wedge > std::numbers::pi) {
                        wedge = 2 * std::numbers::pi - wedge;
                        start = aj;
                    }
                    if (wedge >= 0.75 * std::numbers::pi) continue;
                    bool inside = false;
                    for (size_t k = 0; k < v.size(); ++k) {
                        if (k == i || k == j) continue;
                        const double t =
                            std::fmod(heading(c, v[k]) - start + 4 * std::numbers::pi, 2 * std::numbers::pi);
                        if (t > 0 && t < wedge) inside = true;
                    }
                    if (inside) continue;
                    const std::set<int> na = neighbours(v[i]), nbb = neighbours(v[j]);
                    int common = 0;
                    for (int x : na)
                        if (x != c && nbb.count(x)) ++common;
                    if (common != 1) bad.push_back(tag + "adjacent pair with " + std::to_string(common) + " common corners");
                }
            }
        }
        for (int r = 0; r < grid.rows; ++r) {
            for (int col = 0; col < grid.cols; ++col) {
                const int a = ids[r * grid.cols + col];
                std::set<int> lattice_nb;
                if (r > 0) lattice_nb.insert(ids[(r - 1) * grid.cols + col]);
                if (r + 1 < grid.rows) lattice_nb.insert(ids[(r + 1) * grid.cols + col]);
                if (col > 0) lattice_nb.insert(ids[r * grid.cols + col - 1]);
                if (col + 1 < grid.cols) lattice_nb.insert(ids[r * grid.cols + col + 1]);
                std::set<int> graph_nb;
                for (int n : neighbours(a))
                    if (members.count(n)) graph_nb.insert(n);
                if (graph_nb != lattice_nb) bad.push_back(tag + "graph and lattice adjacency differ");
            }
        }
    }
    return bad;
}

}  // namespace xchess::testing
