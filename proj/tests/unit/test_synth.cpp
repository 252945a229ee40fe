#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "scenes.hpp"
#include "xchess/synth.hpp"

using namespace xchess;
using xchess::testing::Gen;

namespace {

// Coverage oracle: point-sample the board at the same sub-pixel grid through the inverse map.
double oracle_pixel(const SceneSpec& s, int x, int y) {
    const Homography inv = s.homography.inverse();
    const int n = s.supersample;
    int dark = 0;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            const Point2d p = inv.apply({x + (a + 0.5) / n, y + (b + 0.5) / n}) - s.origin;
            const double u = p.x / s.square_size, v = p.y / s.square_size;
            if (u < 0 || v < 0 || u >= s.squares_cols || v >= s.squares_rows) continue;
            dark += (static_cast<int>(std::floor(u)) + static_cast<int>(std::floor(v))) % 2 == 0;
        }
    const double cov = double(dark) / (n * n);
    return s.fg * cov + s.bg * (1 - cov);
}

}  // namespace

TEST_CASE("homography from four points maps them and inverts") {
    Gen g(51);
    for (int t = 0; t < 100; ++t) {
        const std::array<Point2d, 4> src{Point2d{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        const std::array<Point2d, 4> dst{Point2d{g.real(0, 40), g.real(0, 40)}, {g.real(60, 100), g.real(0, 40)},
                                         {g.real(60, 100), g.real(60, 100)}, {g.real(0, 40), g.real(60, 100)}};
        const Homography h = Homography::from_quad(src, dst);
        for (int k = 0; k < 4; ++k) CHECK(distance(h.apply(src[k]), dst[k]) < 1e-8);
        const Point2d p{g.real(0, 1), g.real(0, 1)};
        CHECK(distance(h.inverse().apply(h.apply(p)), p) < 1e-9);
        CHECK(distance((h * Homography::translation(2, 3)).apply(p), h.apply(p + Point2d{2, 3})) < 1e-9);
    }
}

TEST_CASE("rendered pixels equal supersampled coverage") {
    Gen g(52);
    for (int t = 0; t < 5; ++t) {
        SceneSpec s = xchess::testing::random_pose(g.engine(), g.integer(2, 5), g.integer(2, 5), 64, 48);
        s.supersample = g.integer(1, 5);
        s.fg = g.real(0, 0.4);
        s.bg = g.real(0.6, 1);
        const Scene scene = render(s);
        const double bound = 1.0 / (2.0 * s.supersample * s.supersample) + 1e-6;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x) CHECK(std::abs(scene.image(x, y) - oracle_pixel(s, x, y)) <= bound);
    }
}

TEST_CASE("ground truth follows the homography and ignores rendering options") {
    Gen g(53);
    SceneSpec s = xchess::testing::random_pose(g.engine(), 4, 5, 320, 240);
    const GroundTruth a = scene_ground_truth(s);
    CHECK(a.rows == 3);
    CHECK(a.cols == 4);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) {
            const Point2d p = s.homography.apply(s.origin + Point2d{s.square_size * (c + 1), s.square_size * (r + 1)});
            CHECK(distance(a.corners[static_cast<size_t>(r * 4 + c)], p) < 1e-12);
        }
    SceneSpec t = s;
    t.supersample = 1;
    t.blur_sigma = 3;
    t.noise_sigma = 0.1;
    t.seed = 99;
    CHECK(render(t).truth.corners == a.corners);
}

TEST_CASE("rendering is deterministic in the seed") {
    Gen g(54);
    SceneSpec s = xchess::testing::random_pose(g.engine(), 4, 4, 80, 60);
    s.noise_sigma = 0.05;
    s.seed = 7;
    CHECK(render(s).image == render(s).image);
    SceneSpec t = s;
    t.seed = 8;
    CHECK(!(render(t).image == render(s).image));
    s.noise_sigma = t.noise_sigma = 0;
    CHECK(render(t).image == render(s).image);
    const GrayImage img = render(t).image;
    for (float v : img.pixels()) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("gaussian blur matches a direct separable convolution") {
    Gen g(55);
    const GrayImage img = g.image(15, 11);
    const double sigma = 1.3;
    const int rad = static_cast<int>(std::ceil(3 * sigma));
    std::vector<double> k;
    double sum = 0;
    for (int i = -rad; i <= rad; ++i) k.push_back(std::exp(-0.5 * i * i / (sigma * sigma))), sum += k.back();
    for (double& v : k) v /= sum;
    const GrayImage b = gaussian_blur(img, sigma);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0;
            for (int j = -rad; j <= rad; ++j)
                for (int i = -rad; i <= rad; ++i) acc += k[i + rad] * k[j + rad] * img.clamped(x + i, y + j);
            CHECK(b(x, y) == doctest::Approx(acc).epsilon(1e-5));
        }
    CHECK(gaussian_blur(img, 0) == img);
}

TEST_CASE("blur sweeps share geometry and validate sigmas") {
    Gen g(56);
    SceneSpec s = xchess::testing::random_pose(g.engine(), 3, 4, 120, 90);
    const auto sweep = blur_sweep(s, {0, 1, 2});
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].image == render(s).image);
    CHECK(sweep[2].truth.corners == sweep[0].truth.corners);
    CHECK_THROWS_AS(blur_sweep(s, {2, 1}), Error);
    CHECK_THROWS_AS(blur_sweep(s, {-1}), Error);
}

TEST_CASE("invalid scenes are rejected") {
    SceneSpec s;
    CHECK_NOTHROW(validate_scene(s));
    SceneSpec a = s;
    a.fg = a.bg;
    CHECK_THROWS_AS(validate_scene(a), Error);
    SceneSpec b = s;
    b.supersample = 0;
    CHECK_THROWS_AS(validate_scene(b), Error);
    SceneSpec c = s;
    c.homography = Homography::translation(400, 0);
    CHECK_THROWS_AS(validate_scene(c), Error);
    SceneSpec d = s;
    d.squares_rows = 1;
    CHECK_THROWS_AS(validate_scene(d), Error);
}
