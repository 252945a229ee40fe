#include "xchess/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace xchess {

Point2d Homography::apply(Point2d p) const {
    const double w = h[6] * p.x + h[7] * p.y + h[8];
    return {(h[0] * p.x + h[1] * p.y + h[2]) / w, (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

double Homography::determinant() const {
    return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) +
           h[2] * (h[3] * h[7] - h[4] * h[6]);
}

Homography Homography::inverse() const {
    const double det = determinant();
    if (!(std::abs(det) > 1e-12)) throw Error("homography is singular");
    Homography r;
    r.h = {(h[4] * h[8] - h[5] * h[7]) / det, (h[2] * h[7] - h[1] * h[8]) / det, (h[1] * h[5] - h[2] * h[4]) / det,
           (h[5] * h[6] - h[3] * h[8]) / det, (h[0] * h[8] - h[2] * h[6]) / det, (h[2] * h[3] - h[0] * h[5]) / det,
           (h[3] * h[7] - h[4] * h[6]) / det, (h[1] * h[6] - h[0] * h[7]) / det, (h[0] * h[4] - h[1] * h[3]) / det};
    return r;
}

Homography Homography::operator*(const Homography& o) const {
    Homography r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.h[3 * i + j] = h[3 * i] * o.h[j] + h[3 * i + 1] * o.h[3 + j] + h[3 * i + 2] * o.h[6 + j];
    return r;
}

Homography Homography::translation(double tx, double ty) {
    Homography r;
    r.h = {1, 0, tx, 0, 1, ty, 0, 0, 1};
    return r;
}

Homography Homography::from_quad(const std::array<Point2d, 4>& src, const std::array<Point2d, 4>& dst) {
    // 8x8 system for h0..h7 with h8 = 1, solved by Gaussian elimination with partial pivoting.
    double a[8][9] = {};
    for (int k = 0; k < 4; ++k) {
        const double x = src[k].x, y = src[k].y, u = dst[k].x, v = dst[k].y;
        double* r0 = a[2 * k];
        double* r1 = a[2 * k + 1];
        r0[0] = x, r0[1] = y, r0[2] = 1, r0[6] = -u * x, r0[7] = -u * y, r0[8] = u;
        r1[3] = x, r1[4] = y, r1[5] = 1, r1[6] = -v * x, r1[7] = -v * y, r1[8] = v;
    }
    for (int col = 0; col < 8; ++col) {
        int piv = col;
        for (int r = col + 1; r < 8; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12) throw Error("degenerate quad for homography");
        std::swap(a[piv], a[col]);
        for (int r = 0; r < 8; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
        }
    }
    Homography hm;
    for (int i = 0; i < 8; ++i) hm.h[i] = a[i][8] / a[i][i];
    hm.h[8] = 1;
    return hm;
}

void validate_scene(const SceneSpec& spec) {
    if (spec.squares_rows < 2 || spec.squares_cols < 2) throw Error("board needs at least 2x2 squares");
    if (!(spec.square_size > 0)) throw Error("square_size must be positive");
    if (spec.width <= 0 || spec.height <= 0) throw Error("image size must be positive");
    if (spec.supersample < 1) throw Error("supersample must be >= 1");
    if (spec.fg == spec.bg) throw Error("fg and bg must differ");
    if (spec.fg < 0 || spec.fg > 1 || spec.bg < 0 || spec.bg > 1) throw Error("fg/bg must lie in [0,1]");
    if (spec.blur_sigma < 0 || spec.noise_sigma < 0) throw Error("sigmas must be nonnegative");
    if (!(std::abs(spec.homography.determinant()) > 1e-12)) throw Error("homography is not invertible");
    const double bw = spec.squares_cols * spec.square_size;
    const double bh = spec.squares_rows * spec.square_size;
    const Point2d o = spec.origin;
    const std::array<Point2d, 4> outline{o, o + Point2d{bw, 0}, o + Point2d{bw, bh}, o + Point2d{0, bh}};
    for (Point2d p : outline) {
        if (!(spec.homography.depth(p) > 0)) throw Error("board is behind the camera");
        const Point2d q = spec.homography.apply(p);
        if (!(q.x >= 0 && q.y >= 0 && q.x <= spec.width && q.y <= spec.height))
            throw Error("board is not fully inside the image");
    }
}

GroundTruth scene_ground_truth(const SceneSpec& spec) {
    GroundTruth gt;
    gt.rows = spec.squares_rows - 1;
    gt.cols = spec.squares_cols - 1;
    gt.corners.reserve(static_cast<size_t>(gt.rows) * gt.cols);
    for (int i = 0; i < gt.rows; ++i)
        for (int j = 0; j < gt.cols; ++j)
            gt.corners.push_back(spec.homography.apply(
                spec.origin + Point2d{spec.square_size * (j + 1), spec.square_size * (i + 1)}));
    return gt;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (!(sigma > 0)) return img;
    const int rad = static_cast<int>(std::ceil(3 * sigma));
    std::vector<float> k(static_cast<size_t>(2 * rad + 1));
    double sum = 0;
    for (int i = -rad; i <= rad; ++i) sum += std::exp(-0.5 * i * i / (sigma * sigma));
    for (int i = -rad; i <= rad; ++i) k[i + rad] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)) / sum);

    const int w = img.width(), h = img.height();
    GrayImage tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        const float* s = img.row(y);
        float* d = tmp.row(y);
        for (int x = 0; x < w; ++x) {
            float acc = 0;
            for (int i = -rad; i <= rad; ++i) acc += k[i + rad] * s[std::clamp(x + i, 0, w - 1)];
            d[x] = acc;
        }
    }
    std::vector<const float*> rows(static_cast<size_t>(2 * rad + 1));
    for (int y = 0; y < h; ++y) {
        for (int i = -rad; i <= rad; ++i) rows[i + rad] = tmp.row(std::clamp(y + i, 0, h - 1));
        float* d = out.row(y);
        for (int x = 0; x < w; ++x) {
            float acc = 0;
            for (int i = 0; i <= 2 * rad; ++i) acc += k[i] * rows[i][x];
            d[x] = acc;
        }
    }
    return out;
}

namespace {

// Cell index on the infinite square lattice of the board plane; cells off the board are
// still distinct convex regions, which is what the uniform-pixel shortcut relies on.
struct Cell {
    int64_t cx;
    int64_t cy;
    bool operator==(const Cell&) const = default;
};

class BoardShader {
public:
    explicit BoardShader(const SceneSpec& spec) : spec_(spec), inv_(spec.homography.inverse()) {}

    Cell cell(double ix, double iy) const {
        const Point2d p = inv_.apply({ix, iy}) - spec_.origin;
        return {static_cast<int64_t>(std::floor(p.x / spec_.square_size)),
                static_cast<int64_t>(std::floor(p.y / spec_.square_size))};
    }

    bool dark(const Cell& c) const {
        if (c.cx < 0 || c.cy < 0 || c.cx >= spec_.squares_cols || c.cy >= spec_.squares_rows) return false;
        return ((c.cx + c.cy) & 1) == 0;
    }

private:
    const SceneSpec& spec_;
    Homography inv_;
};

GrayImage render_sharp(const SceneSpec& spec) {
    validate_scene(spec);
    const BoardShader shader(spec);
    const int w = spec.width, h = spec.height;

    // Pixel-corner cells; a pixel whose four corners share a cell is entirely inside it.
    std::vector<Cell> vertex(static_cast<size_t>(w + 1) * (h + 1));
    for (int y = 0; y <= h; ++y)
        for (int x = 0; x <= w; ++x) vertex[static_cast<size_t>(y) * (w + 1) + x] = shader.cell(x, y);

    const float fg = static_cast<float>(spec.fg);
    const float bg = static_cast<float>(spec.bg);
    const int ss = spec.supersample;
    const double inv_n = 1.0 / (ss * ss);
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Cell& c00 = vertex[static_cast<size_t>(y) * (w + 1) + x];
            const Cell& c10 = vertex[static_cast<size_t>(y) * (w + 1) + x + 1];
            const Cell& c01 = vertex[static_cast<size_t>(y + 1) * (w + 1) + x];
            const Cell& c11 = vertex[static_cast<size_t>(y + 1) * (w + 1) + x + 1];
            if (c00 == c10 && c00 == c01 && c00 == c11) {
                img(x, y) = shader.dark(c00) ? fg : bg;
                continue;
            }
            int dark = 0;
            for (int b = 0; b < ss; ++b)
                for (int a = 0; a < ss; ++a)
                    dark += shader.dark(shader.cell(x + (a + 0.5) / ss, y + (b + 0.5) / ss));
            const double cov = dark * inv_n;
            img(x, y) = static_cast<float>(spec.fg * cov + spec.bg * (1 - cov));
        }
    }
    return img;
}

GrayImage degrade(const GrayImage& sharp, double blur_sigma, double noise_sigma, uint64_t seed) {
    GrayImage img = gaussian_blur(sharp, blur_sigma);
    if (noise_sigma > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (float& v : img.pixels()) v = static_cast<float>(v + noise(rng));
    }
    for (float& v : img.pixels()) v = std::clamp(v, 0.0f, 1.0f);
    return img;
}

}  // namespace

Scene render(const SceneSpec& spec) {
    Scene s;
    s.image = degrade(render_sharp(spec), spec.blur_sigma, spec.noise_sigma, spec.seed);
    s.truth = scene_ground_truth(spec);
    return s;
}

std::vector<Scene> blur_sweep(const SceneSpec& spec, const std::vector<double>& sigmas) {
    for (size_t i = 0; i < sigmas.size(); ++i) {
        if (sigmas[i] < 0) throw Error("blur sigmas must be nonnegative");
        if (i > 0 && sigmas[i] < sigmas[i - 1]) throw Error("blur sigmas must be ascending");
    }
    std::vector<Scene> out;
    if (sigmas.empty()) return out;
    const GrayImage sharp = render_sharp(spec);
    const GroundTruth gt = scene_ground_truth(spec);
    for (double sigma : sigmas) out.push_back({degrade(sharp, sigma, spec.noise_sigma, spec.seed), gt});
    return out;
}

}  // namespace xchess
