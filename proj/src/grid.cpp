#include "xchess/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <tuple>

namespace xchess {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAdjacentLimit = 0.75 * kPi;

double direction(const CornerGraph& g, int from, int to) {
    const Point2d d = g.position(to) - g.position(from);
    return std::atan2(d.y, d.x);
}

}  // namespace

CornerGraph::CornerGraph(std::vector<Point2d> positions, std::vector<double> orientations)
    : positions_(std::move(positions)), orientations_(std::move(orientations)), adjacency_(positions_.size()) {
    if (orientations_.size() != positions_.size()) throw Error("CornerGraph: orientation count mismatch");
}

CornerGraph CornerGraph::from_edges(std::vector<Point2d> positions, std::vector<double> orientations,
                                    const std::vector<EdgeCandidate>& edges) {
    CornerGraph g(std::move(positions), std::move(orientations));
    for (const EdgeCandidate& e : edges) {
        if (!e.accepted) continue;
        if (e.from < 0 || e.to < 0 || e.from >= g.size() || e.to >= g.size() || e.from == e.to)
            throw Error("CornerGraph: edge endpoint out of range");
        g.add_link(e.from, e.to, e.score);
    }
    return g;
}

bool CornerGraph::has_link(int from, int to) const { return link_score(from, to).has_value(); }

std::optional<double> CornerGraph::link_score(int from, int to) const {
    const auto& adj = adjacency_[from];
    auto it = std::lower_bound(adj.begin(), adj.end(), to, [](const Link& l, int v) { return l.to < v; });
    if (it == adj.end() || it->to != to) return std::nullopt;
    return it->score;
}

void CornerGraph::add_link(int from, int to, double score) {
    auto& adj = adjacency_[from];
    auto it = std::lower_bound(adj.begin(), adj.end(), to, [](const Link& l, int v) { return l.to < v; });
    if (it != adj.end() && it->to == to) {
        it->score = score;
        return;
    }
    adj.insert(it, Link{to, score});
}

void CornerGraph::remove_link(int from, int to) {
    auto& adj = adjacency_[from];
    auto it = std::lower_bound(adj.begin(), adj.end(), to, [](const Link& l, int v) { return l.to < v; });
    if (it != adj.end() && it->to == to) adj.erase(it);
}

void CornerGraph::disconnect(int a, int b) {
    remove_link(a, b);
    remove_link(b, a);
}

void CornerGraph::isolate(int node) {
    for (int i = 0; i < size(); ++i) remove_link(i, node);
    adjacency_[node].clear();
}

std::vector<int> CornerGraph::angular_neighbors(int node) const {
    std::vector<std::pair<double, int>> order;
    for (const Link& l : adjacency_[node]) order.emplace_back(direction(*this, node, l.to), l.to);
    std::sort(order.begin(), order.end());
    std::vector<int> out;
    for (const auto& [a, n] : order) out.push_back(n);
    return out;
}

std::vector<int> CornerGraph::common_neighbors(int a, int b, int exclude) const {
    std::vector<int> out;
    for (const Link& la : adjacency_[a]) {
        if (la.to == exclude || la.to == b) continue;
        if (has_link(b, la.to)) out.push_back(la.to);
    }
    return out;
}

size_t CornerGraph::link_count() const {
    size_t n = 0;
    for (const auto& adj : adjacency_) n += adj.size();
    return n;
}

double angle_at(const CornerGraph& g, int c, int a, int b) {
    const Point2d u = g.position(a) - g.position(c);
    const Point2d v = g.position(b) - g.position(c);
    return std::abs(std::atan2(cross(u, v), dot(u, v)));
}

std::vector<std::pair<int, int>> adjacent_neighbor_pairs(const CornerGraph& g, int c) {
    const std::vector<int> nb = g.angular_neighbors(c);
    std::vector<std::pair<int, int>> out;
    const int n = static_cast<int>(nb.size());
    if (n < 2) return out;
    const int pairs = n == 2 ? 1 : n;
    for (int i = 0; i < pairs; ++i) {
        const int a = nb[i];
        const int b = nb[(i + 1) % n];
        if (angle_at(g, c, a, b) < kAdjacentLimit) out.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

bool remove_non_mutual(CornerGraph& g) {
    bool changed = false;
    for (int i = 0; i < g.size(); ++i) {
        std::vector<int> drop;
        for (const Link& l : g.links(i))
            if (!g.has_link(l.to, i)) drop.push_back(l.to);
        for (int j : drop) g.remove_link(i, j);
        changed |= !drop.empty();
    }
    return changed;
}

bool remove_bad_degree(CornerGraph& g) {
    bool changed = false;
    for (int i = 0; i < g.size(); ++i) {
        const int d = g.degree(i);
        if (d == 0 || (d >= 2 && d <= 4)) continue;
        g.isolate(i);
        changed = true;
    }
    return changed;
}

// One common-corner repair at node c; returns true if a connection was removed.
bool repair_common_corner(CornerGraph& g, int c) {
    std::map<int, int> violations;
    for (const auto& [a, b] : adjacent_neighbor_pairs(g, c)) {
        std::vector<int> common = g.common_neighbors(a, b, c);
        if (common.size() == 1) continue;
        if (common.size() >= 2) {
            // Keep the common corner closest to the parallelogram completion; the others
            // close a collapsed square and lose their connections to a and b.
            const Point2d predicted = g.position(a) + g.position(b) - g.position(c);
            std::sort(common.begin(), common.end(), [&](int p, int q) {
                const double dp = distance(g.position(p), predicted);
                const double dq = distance(g.position(q), predicted);
                return std::tie(dp, p) < std::tie(dq, q);
            });
            for (size_t k = 1; k < common.size(); ++k) {
                g.disconnect(common[k], a);
                g.disconnect(common[k], b);
            }
            return true;
        }
        ++violations[a];
        ++violations[b];
    }
    if (violations.empty()) return false;
    int worst = -1;
    int worst_count = 0;
    double worst_score = 0;
    for (const auto& [n, count] : violations) {
        const double score = g.link_score(c, n).value_or(0.0);
        if (worst < 0 || count > worst_count || (count == worst_count && score < worst_score)) {
            worst = n;
            worst_count = count;
            worst_score = score;
        }
    }
    g.disconnect(c, worst);
    return true;
}

}  // namespace

CornerGraph prune_constraints(CornerGraph graph) {
    bool changed = true;
    while (changed) {
        changed = remove_non_mutual(graph);
        changed |= remove_bad_degree(graph);
        if (changed) continue;
        for (int c = 0; c < graph.size(); ++c) {
            if (repair_common_corner(graph, c)) {
                changed = true;
                break;
            }
        }
    }
    return graph;
}

namespace {

struct Ballot {
    std::set<int> overflow_reject;
    std::set<int> triangle_reject;
};

double vote_score(const CornerGraph& g, int c, int a, double max_score, const VoteConfig& cfg) {
    int squares = 0;
    int triangles = 0;
    bool collinear = false;
    for (const Link& l : g.links(c)) {
        const int b = l.to;
        if (b == a) continue;
        const double ang = angle_at(g, c, a, b);
        if (g.connected(a, b)) ++triangles;
        if (ang > 0.25 * kPi && ang < kAdjacentLimit && !g.common_neighbors(a, b, c).empty()) ++squares;
        if (ang >= kAdjacentLimit) collinear = true;
    }
    const double score = g.link_score(c, a).value_or(0.0);
    const double rel = max_score > 0 ? score / max_score : 0.0;
    return cfg.square_weight * squares + cfg.collinear_weight * (collinear ? 1.0 : 0.0) -
           cfg.triangle_weight * triangles + cfg.score_weight * rel;
}

Ballot cast_ballot(const CornerGraph& g, int c, const VoteConfig& cfg) {
    Ballot ballot;
    double max_score = 0;
    for (const Link& l : g.links(c)) max_score = std::max(max_score, l.score);
    std::map<int, double> votes;
    for (const Link& l : g.links(c)) votes[l.to] = vote_score(g, c, l.to, max_score, cfg);

    if (g.degree(c) > cfg.max_degree) {
        std::vector<std::pair<double, int>> ranked;
        for (const auto& [n, v] : votes) ranked.emplace_back(v, n);
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            return std::tie(y.first, x.second) < std::tie(x.first, y.second);
        });
        const double boundary = ranked[cfg.max_degree].first;
        for (size_t k = 0; k < ranked.size(); ++k) {
            // Ties straddling the cut are rejected together.
            if (static_cast<int>(k) >= cfg.max_degree || ranked[k].first == boundary)
                ballot.overflow_reject.insert(ranked[k].second);
        }
    }
    for (const Link& la : g.links(c)) {
        for (const Link& lb : g.links(c)) {
            if (lb.to <= la.to || !g.connected(la.to, lb.to)) continue;
            const double va = votes[la.to];
            const double vb = votes[lb.to];
            if (va < vb) ballot.triangle_reject.insert(la.to);
            else if (vb < va) ballot.triangle_reject.insert(lb.to);
            else {
                ballot.triangle_reject.insert(la.to);
                ballot.triangle_reject.insert(lb.to);
            }
        }
    }
    return ballot;
}

}  // namespace

CornerGraph drop_spanning_links(CornerGraph graph, double tolerance) {
    std::vector<std::pair<int, int>> doomed;
    for (int a = 0; a < graph.size(); ++a) {
        for (const Link& l : graph.links(a)) {
            const int b = l.to;
            const Point2d pa = graph.position(a);
            const Point2d d = graph.position(b) - pa;
            const double len2 = dot(d, d);
            if (len2 <= 0) continue;
            const double len = std::sqrt(len2);
            for (int c = 0; c < graph.size(); ++c) {
                if (c == a || c == b) continue;
                const Point2d v = graph.position(c) - pa;
                const double t = dot(v, d) / len2;
                if (t <= 0 || t >= 1) continue;
                if (std::abs(cross(d, v)) / len < tolerance * len) {
                    doomed.push_back({a, b});
                    break;
                }
            }
        }
    }
    for (auto [a, b] : doomed) graph.remove_link(a, b);
    return graph;
}

CornerGraph resolve_votes(CornerGraph graph, const VoteConfig& config) {
    remove_non_mutual(graph);
    const int max_rounds = 4 * graph.size() + 4;
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<Ballot> ballots(static_cast<size_t>(graph.size()));
        for (int c = 0; c < graph.size(); ++c) ballots[c] = cast_ballot(graph, c, config);
        std::vector<std::pair<int, int>> removals;
        for (int a = 0; a < graph.size(); ++a) {
            for (const Link& l : graph.links(a)) {
                const int b = l.to;
                if (b < a) continue;
                const bool overflow = ballots[a].overflow_reject.count(b) || ballots[b].overflow_reject.count(a);
                const bool triangle = ballots[a].triangle_reject.count(b) && ballots[b].triangle_reject.count(a);
                if (overflow || triangle) removals.emplace_back(a, b);
            }
        }
        if (removals.empty()) break;
        for (const auto& [a, b] : removals) graph.disconnect(a, b);
    }
    return graph;
}

int Lattice::row_min() const {
    int v = cells.begin()->first.first;
    for (const auto& [c, n] : cells) v = std::min(v, c.first);
    return v;
}
int Lattice::row_max() const {
    int v = cells.begin()->first.first;
    for (const auto& [c, n] : cells) v = std::max(v, c.first);
    return v;
}
int Lattice::col_min() const {
    int v = cells.begin()->first.second;
    for (const auto& [c, n] : cells) v = std::min(v, c.second);
    return v;
}
int Lattice::col_max() const {
    int v = cells.begin()->first.second;
    for (const auto& [c, n] : cells) v = std::max(v, c.second);
    return v;
}

namespace {

Cell rotate_cw(Cell d) { return {d.second, -d.first}; }

}  // namespace

std::vector<Lattice> assign_lattices(const CornerGraph& graph) {
    std::vector<Lattice> out;
    std::vector<char> visited(static_cast<size_t>(graph.size()), 0);
    for (int seed = 0; seed < graph.size(); ++seed) {
        if (visited[seed] || graph.degree(seed) < 2) continue;

        struct State {
            Cell coord;
            Point2d ref_vec;
            Cell ref_dir;
        };
        std::map<int, State> state;
        Lattice lat;
        const int first = graph.links(seed).front().to;
        state[seed] = {{0, 0}, graph.position(first) - graph.position(seed), {0, 1}};
        lat.cells[{0, 0}] = seed;
        visited[seed] = 1;
        std::queue<int> queue;
        queue.push(seed);
        while (!queue.empty()) {
            const int q = queue.front();
            queue.pop();
            const State sq = state[q];
            for (const Link& l : graph.links(q)) {
                const int w = l.to;
                const Point2d v = graph.position(w) - graph.position(q);
                const double phi = std::atan2(cross(sq.ref_vec, v), dot(sq.ref_vec, v));
                int k = static_cast<int>(std::lround(phi / (0.5 * kPi)));
                k = ((k % 4) + 4) % 4;
                Cell dir = sq.ref_dir;
                for (int r = 0; r < k; ++r) dir = rotate_cw(dir);
                const Cell target{sq.coord.first + dir.first, sq.coord.second + dir.second};
                if (visited[w]) continue;
                if (lat.cells.count(target)) continue;
                visited[w] = 1;
                state[w] = {target, graph.position(q) - graph.position(w), {-dir.first, -dir.second}};
                lat.cells[target] = w;
                queue.push(w);
            }
        }
        if (lat.cells.size() >= 4) out.push_back(std::move(lat));
    }
    return out;
}

Lattice trim_to_complete(Lattice lattice) {
    while (!lattice.cells.empty()) {
        if (lattice.rows() < 2 || lattice.cols() < 2) return {};
        if (lattice.complete()) return lattice;
        const int r0 = lattice.row_min(), r1 = lattice.row_max();
        const int c0 = lattice.col_min(), c1 = lattice.col_max();

        struct Line {
            bool is_row;
            int index;
            int length;
            int filled;
        };
        std::vector<Line> lines = {{true, r0, c1 - c0 + 1, 0},
                                   {true, r1, c1 - c0 + 1, 0},
                                   {false, c0, r1 - r0 + 1, 0},
                                   {false, c1, r1 - r0 + 1, 0}};
        for (Line& l : lines) {
            for (const auto& [cell, n] : lattice.cells)
                if ((l.is_row ? cell.first : cell.second) == l.index) ++l.filled;
        }
        std::vector<Line> candidates;
        for (const Line& l : lines)
            if (l.filled < l.length) candidates.push_back(l);
        // Holes strictly inside: every outer line is full, so any of them may go.
        if (candidates.empty()) candidates = lines;

        const Line* pick = nullptr;
        for (const Line& l : candidates) {
            if (!pick) {
                pick = &l;
                continue;
            }
            // Lowest fill ratio, then the shorter line.
            const long lhs = static_cast<long>(l.filled) * pick->length;
            const long rhs = static_cast<long>(pick->filled) * l.length;
            if (lhs < rhs || (lhs == rhs && l.length < pick->length)) pick = &l;
        }
        const Line chosen = *pick;
        for (auto it = lattice.cells.begin(); it != lattice.cells.end();) {
            if ((chosen.is_row ? it->first.first : it->first.second) == chosen.index) it = lattice.cells.erase(it);
            else ++it;
        }
    }
    return lattice;
}

double convex_hull_area(std::vector<Point2d> points) {
    if (points.size() < 3) return 0.0;
    std::sort(points.begin(), points.end(),
              [](const Point2d& a, const Point2d& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    std::vector<Point2d> hull(2 * points.size());
    size_t k = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = points[i];
    }
    for (size_t i = points.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    double area = 0;
    for (size_t i = 0; i < hull.size(); ++i) area += cross(hull[i], hull[(i + 1) % hull.size()]);
    return 0.5 * std::abs(area);
}

Lattice trim_consistent(Lattice lattice, const CornerGraph& graph) {
    for (;;) {
        lattice = trim_to_complete(std::move(lattice));
        if (lattice.cells.empty()) return lattice;
        std::map<int, Cell> where;
        for (const auto& [cell, n] : lattice.cells) where[n] = cell;
        // Mismatches per cell: lattice neighbours without a link plus links to non-neighbours.
        Cell worst{};
        int worst_count = 0;
        for (const auto& [cell, n] : lattice.cells) {
            int count = 0;
            const std::array<Cell, 4> around{Cell{cell.first - 1, cell.second}, Cell{cell.first + 1, cell.second},
                                             Cell{cell.first, cell.second - 1}, Cell{cell.first, cell.second + 1}};
            for (const Cell& a : around) {
                const auto it = lattice.cells.find(a);
                if (it != lattice.cells.end() && !graph.connected(n, it->second)) ++count;
            }
            for (const Link& l : graph.links(n)) {
                const auto it = where.find(l.to);
                if (it == where.end()) continue;
                const int d = std::abs(it->second.first - cell.first) + std::abs(it->second.second - cell.second);
                if (d != 1) ++count;
            }
            if (count > worst_count) {
                worst_count = count;
                worst = cell;
            }
        }
        if (worst_count == 0) return lattice;
        lattice.cells.erase(worst);
    }
}

std::vector<Lattice> enforce_single_grid(std::vector<Lattice> lattices, const CornerGraph& graph,
                                         std::optional<Shape> known_shape, bool expect_single) {
    std::vector<Lattice> kept;
    for (Lattice& lat : lattices) {
        Lattice trimmed = trim_consistent(std::move(lat), graph);
        if (trimmed.cells.empty()) continue;
        if (known_shape && !known_shape->matches({trimmed.rows(), trimmed.cols()})) continue;
        kept.push_back(std::move(trimmed));
    }
    if (expect_single && kept.size() > 1) {
        size_t best = 0;
        double best_area = -1;
        for (size_t i = 0; i < kept.size(); ++i) {
            std::vector<Point2d> pts;
            for (const auto& [cell, n] : kept[i].cells) pts.push_back(graph.position(n));
            const double area = convex_hull_area(pts);
            if (area > best_area) {
                best_area = area;
                best = i;
            }
        }
        Lattice winner = std::move(kept[best]);
        kept.clear();
        kept.push_back(std::move(winner));
    }
    return kept;
}

bool square_is_dark(const CornerGraph& graph, const std::array<int, 4>& square_nodes) {
    Point2d center{0, 0};
    for (int n : square_nodes) center = center + 0.25 * graph.position(n);
    int dark = 0;
    int light = 0;
    bool first_dark = false;
    for (size_t i = 0; i < square_nodes.size(); ++i) {
        const int n = square_nodes[i];
        const Point2d v = center - graph.position(n);
        // Light sectors span [theta, theta + pi/2] modulo pi.
        double t = std::fmod(std::atan2(v.y, v.x) - graph.orientation(n), kPi);
        if (t < 0) t += kPi;
        const bool is_dark = t >= 0.5 * kPi;
        (is_dark ? dark : light)++;
        if (i == 0) first_dark = is_dark;
    }
    if (dark != light) return dark > light;
    return first_dark;
}

std::optional<ChessboardGrid> to_chessboard(const Lattice& lattice, const CornerGraph& graph) {
    if (!lattice.complete() || lattice.rows() < 2 || lattice.cols() < 2) return std::nullopt;
    const int r0 = lattice.row_min(), c0 = lattice.col_min();
    const int R = lattice.rows(), C = lattice.cols();
    auto node_at = [&](int r, int c) { return lattice.cells.at({r0 + r, c0 + c}); };

    // Lattice handedness from geometry, so the result does not depend on how cells were labelled.
    const Point2d o = graph.position(node_at(0, 0));
    const bool flipped = cross(graph.position(node_at(0, 1)) - o, graph.position(node_at(1, 0)) - o) < 0;
    // Local cell accessor with +row = +col rotated by +90 degrees in image coordinates.
    const int LR = flipped ? C : R;
    const int LC = flipped ? R : C;
    auto local = [&](int r, int c) { return flipped ? node_at(c, r) : node_at(r, c); };

    struct Candidate {
        int rows, cols;
        std::vector<int> nodes;
        bool dark;
        std::vector<double> coords;
    };
    std::vector<Candidate> cands;
    for (int k = 0; k < 4; ++k) {
        Candidate cand;
        cand.rows = k % 2 ? LC : LR;
        cand.cols = k % 2 ? LR : LC;
        for (int i = 0; i < cand.rows; ++i) {
            for (int j = 0; j < cand.cols; ++j) {
                int r = 0, c = 0;
                switch (k) {
                    case 0: r = i; c = j; break;
                    case 1: r = LR - 1 - j; c = i; break;
                    case 2: r = LR - 1 - i; c = LC - 1 - j; break;
                    default: r = j; c = LC - 1 - i; break;
                }
                cand.nodes.push_back(local(r, c));
            }
        }
        const auto& nd = cand.nodes;
        cand.dark = square_is_dark(graph, {nd[0], nd[1], nd[cand.cols + 1], nd[cand.cols]});
        for (int n : nd) {
            cand.coords.push_back(graph.position(n).x);
            cand.coords.push_back(graph.position(n).y);
        }
        cands.push_back(std::move(cand));
    }
    const bool any_dark = std::any_of(cands.begin(), cands.end(), [](const Candidate& c) { return c.dark; });
    const Candidate* best = nullptr;
    for (const Candidate& c : cands) {
        if (any_dark && !c.dark) continue;
        if (!best) {
            best = &c;
            continue;
        }
        const bool c_wide = c.rows <= c.cols;
        const bool b_wide = best->rows <= best->cols;
        if (c_wide != b_wide) {
            if (c_wide) best = &c;
            continue;
        }
        if (c.coords < best->coords) best = &c;
    }
    ChessboardGrid grid;
    grid.rows = best->rows;
    grid.cols = best->cols;
    grid.nodes = best->nodes;
    for (int n : grid.nodes) grid.corners.push_back(graph.position(n));
    return grid;
}

}  // namespace xchess
