#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "xchess/config.hpp"

using namespace xchess;
using xchess::testing::Gen;

namespace {

DetectorConfig random_config(Gen& g) {
    DetectorConfig c;
    c.min_dimension = g.integer(16, 200);
    c.xcorner.ring_radius = g.real(1, 6);
    c.xcorner.nms_radius = g.integer(1, 5);
    c.xcorner.cascade.rel_threshold = g.real(0, 0.2);
    c.xcorner.cascade.pos_radius = g.integer(1, 6);
    c.xcorner.cascade.pos_max = g.integer(0, 30);
    c.xcorner.cascade.eig_threshold = g.real(0, 1e-2);
    c.xcorner.meanshift.tolerance = g.real(1e-6, 1e-2);
    c.xcorner.spokes.spokes = 4 * g.integer(2, 16);
    c.match_radius = g.real(0.5, 3);
    c.edges.keep_fraction = g.real(0.05, 1);
    c.edges.edge_threshold = g.real(-1, 1);
    c.edges.lateral_min = g.real(0.5, 2);
    c.edges.lateral_max = c.edges.lateral_min + g.real(0, 5);
    c.votes.score_weight = g.real(0, 2);
    if (g.coin()) c.known_shape = Shape{g.integer(2, 12), g.integer(2, 12)};
    c.expect_single = g.coin();
    return c;
}

}  // namespace

TEST_CASE("serialized configs parse back to identical values") {
    Gen g(71);
    for (int t = 0; t < 300; ++t) {
        const DetectorConfig c = random_config(g);
        const DetectorConfig back = parse_config(serialize_config(c));
        CHECK(back.min_dimension == c.min_dimension);
        CHECK(back.xcorner.ring_radius == c.xcorner.ring_radius);
        CHECK(back.xcorner.cascade.eig_threshold == c.xcorner.cascade.eig_threshold);
        CHECK(back.xcorner.meanshift.tolerance == c.xcorner.meanshift.tolerance);
        CHECK(back.xcorner.spokes.spokes == c.xcorner.spokes.spokes);
        CHECK(back.edges.keep_fraction == c.edges.keep_fraction);
        CHECK(back.edges.edge_threshold == c.edges.edge_threshold);
        CHECK(back.votes.score_weight == c.votes.score_weight);
        CHECK(back.known_shape == c.known_shape);
        CHECK(back.expect_single == c.expect_single);
        CHECK(serialize_config(back) == serialize_config(c));
    }
}

TEST_CASE("defaults, comments and partial files") {
    CHECK(parse_config("") == DetectorConfig{});
    const DetectorConfig c = parse_config("# tuned\nconnect.k_neighbors = 6  # fewer\n\n grid.known_shape = 7x9\n");
    CHECK(c.edges.k_neighbors == 6);
    CHECK(c.known_shape == Shape{7, 9});
    CHECK(c.edges.samples_n == EdgeConfig{}.samples_n);
}

TEST_CASE("bad config text is rejected") {
    CHECK_THROWS_AS(parse_config("nope = 1"), Error);
    CHECK_THROWS_AS(parse_config("connect.k_neighbors"), Error);
    CHECK_THROWS_AS(parse_config("connect.k_neighbors = six"), Error);
    CHECK_THROWS_AS(parse_config("connect.k_neighbors = 6.5"), Error);
    CHECK_THROWS_AS(parse_config("connect.keep_fraction = 0"), Error);
    CHECK_THROWS_AS(parse_config("grid.expect_single = maybe"), Error);
    CHECK_THROWS_AS(parse_config("spokes.count = 30"), Error);
    CHECK_THROWS_AS(parse_config("grid.known_shape = 1x5"), Error);
}

TEST_CASE("shape parsing") {
    CHECK(parse_shape("6x8") == Shape{6, 8});
    CHECK(parse_shape("6X8") == Shape{6, 8});
    CHECK(parse_shape("6, 8") == Shape{6, 8});
    CHECK_THROWS_AS(parse_shape("68"), Error);
    CHECK_THROWS_AS(parse_shape("ax8"), Error);
}

TEST_CASE("config files load and missing files raise IoError") {
    const auto dir = std::filesystem::temp_directory_path() / "xchess_unit";
    std::filesystem::create_directories(dir);
    const auto path = dir / "cfg.txt";
    std::ofstream(path) << "grid.expect_single = true\n";
    CHECK(load_config(path).expect_single);
    CHECK_THROWS_AS(load_config(dir / "missing.txt"), IoError);
}
