#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "xchess/connect.hpp"
#include "xchess/image.hpp"

namespace xchess {

struct Link {
    int to = -1;
    double score = 0.0;
};

/// Directed corner connectivity. A connection is mutual when both directions exist.
class CornerGraph {
public:
    CornerGraph() = default;
    CornerGraph(std::vector<Point2d> positions, std::vector<double> orientations);

    /// Builds the graph from the accepted members of `edges`.
    static CornerGraph from_edges(std::vector<Point2d> positions, std::vector<double> orientations,
                                  const std::vector<EdgeCandidate>& edges);

    int size() const { return static_cast<int>(positions_.size()); }
    const Point2d& position(int i) const { return positions_[i]; }
    double orientation(int i) const { return orientations_[i]; }
    const std::vector<Link>& links(int i) const { return adjacency_[i]; }
    int degree(int i) const { return static_cast<int>(adjacency_[i].size()); }

    bool has_link(int from, int to) const;
    std::optional<double> link_score(int from, int to) const;
    bool connected(int a, int b) const { return has_link(a, b) && has_link(b, a); }

    /// Adds or updates a directed link.
    void add_link(int from, int to, double score);
    void remove_link(int from, int to);
    /// Removes both directions.
    void disconnect(int a, int b);
    /// Removes every link into or out of `node`.
    void isolate(int node);

    /// Neighbours sorted by angle around `node` (atan2 in image coordinates).
    std::vector<int> angular_neighbors(int node) const;

    /// Neighbours of a and b other than `exclude`.
    std::vector<int> common_neighbors(int a, int b, int exclude) const;

    size_t link_count() const;

private:
    std::vector<Point2d> positions_;
    std::vector<double> orientations_;
    std::vector<std::vector<Link>> adjacency_;  // sorted by `to`
};

/// Angle in [0, pi] between b - c and a - c.
double angle_at(const CornerGraph& g, int c, int a, int b);

/// Pairs of neighbours of `c` that are angularly consecutive and less than 135 degrees apart;
/// these are the pairs that must close a square.
std::vector<std::pair<int, int>> adjacent_neighbor_pairs(const CornerGraph& g, int c);

/// Enforces, to a fixpoint: mutual connections only; degree in {2,3,4}; every adjacent
/// neighbour pair shares exactly one other common corner.
CornerGraph prune_constraints(CornerGraph graph);

/// Removes links whose segment passes over another corner: within `tolerance` times the
/// link length of the segment, strictly between its ends. Board edges join neighbours only.
CornerGraph drop_spanning_links(CornerGraph graph, double tolerance = 0.1);

struct VoteConfig {
    int max_degree = 4;
    double square_weight = 2.0;
    double collinear_weight = 1.0;
    double triangle_weight = 2.0;
    double score_weight = 0.5;
};

/// Local ambiguity resolution. Nodes with more than max_degree connections keep their
/// best-ranked ones; every corner of a triangle votes against its weaker connection in it
/// and connections rejected by both endpoints are removed.
CornerGraph resolve_votes(CornerGraph graph, const VoteConfig& config = {});

/// Integer lattice coordinates (row, col) of a connected component.
using Cell = std::pair<int, int>;

struct Lattice {
    std::map<Cell, int> cells;

    int row_min() const;
    int row_max() const;
    int col_min() const;
    int col_max() const;
    int rows() const { return cells.empty() ? 0 : row_max() - row_min() + 1; }
    int cols() const { return cells.empty() ? 0 : col_max() - col_min() + 1; }
    bool complete() const { return !cells.empty() && static_cast<int>(cells.size()) == rows() * cols(); }
};

/// Breadth-first lattice coordinates for each connected component of at least four nodes.
/// The +row axis is the +col axis rotated by +90 degrees in image coordinates.
std::vector<Lattice> assign_lattices(const CornerGraph& graph);

/// Repeatedly removes the sparsest incomplete outer row or column until the lattice is a
/// complete rectangle; empty if fewer than 2 rows or columns survive.
Lattice trim_to_complete(Lattice lattice);

/// Like trim_to_complete, but also drops cells whose links disagree with lattice adjacency
/// (a missing link to a lattice neighbour or a link to a non-neighbour member) until none remain.
Lattice trim_consistent(Lattice lattice, const CornerGraph& graph);

struct Shape {
    int rows = 0;
    int cols = 0;
    bool operator==(const Shape&) const = default;
    bool matches(const Shape& o) const { return *this == o || (rows == o.cols && cols == o.rows); }
};

/// Area of the convex hull of a point set.
double convex_hull_area(std::vector<Point2d> points);

/// Trims every lattice, keeps those matching `known_shape` (either transpose) and, when
/// `expect_single`, only the one with the largest convex hull.
std::vector<Lattice> enforce_single_grid(std::vector<Lattice> lattices, const CornerGraph& graph,
                                         std::optional<Shape> known_shape, bool expect_single);

struct ChessboardGrid {
    int rows = 0;
    int cols = 0;
    /// Graph node of each corner, row-major canonical order.
    std::vector<int> nodes;
    std::vector<Point2d> corners;
};

/// True if the square with corners `square_nodes` (in cyclic order) is dark, by majority of
/// the orientation of its four corners; ties go to the first corner.
bool square_is_dark(const CornerGraph& graph, const std::array<int, 4>& square_nodes);

/// Canonical ordering of a complete lattice. Among the four rotations, prefers an origin whose
/// inner square is dark, then rows <= cols, then the lexicographically smallest sequence of
/// corner coordinates.
std::optional<ChessboardGrid> to_chessboard(const Lattice& lattice, const CornerGraph& graph);

}  // namespace xchess
