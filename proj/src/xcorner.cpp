#include "xchess/xcorner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>

namespace xchess {

namespace {

constexpr double kPi = std::numbers::pi;

// Precomputed bilinear taps for a fixed offset on a raster of known stride.
struct Tap {
    int dx = 0;
    int dy = 0;
    float w00 = 1, w10 = 0, w01 = 0, w11 = 0;
    bool single = true;
};

Tap make_tap(Point2d offset) {
    Tap t;
    const double fx0 = std::floor(offset.x);
    const double fy0 = std::floor(offset.y);
    double fx = offset.x - fx0;
    double fy = offset.y - fy0;
    // Snap rounding noise so exact integer offsets take the single-tap path.
    if (fx < 1e-9) fx = 0;
    if (fy < 1e-9) fy = 0;
    if (fx > 1 - 1e-9) fx = 0, t.dx = 1;
    if (fy > 1 - 1e-9) fy = 0, t.dy = 1;
    t.dx += static_cast<int>(fx0);
    t.dy += static_cast<int>(fy0);
    t.w00 = static_cast<float>((1 - fx) * (1 - fy));
    t.w10 = static_cast<float>(fx * (1 - fy));
    t.w01 = static_cast<float>((1 - fx) * fy);
    t.w11 = static_cast<float>(fx * fy);
    t.single = fx == 0 && fy == 0;
    return t;
}

inline float xscore_f(float v1, float v2, float v3, float v4) {
    const float mu = 0.25f * ((v1 + v2) + (v3 + v4));
    return (v1 - mu) * (v3 - mu) + (v2 - mu) * (v4 - mu);
}

}  // namespace

SampleRing SampleRing::make(double radius) {
    SampleRing ring;
    ring.radius = radius;
    for (int k = 0; k < 8; ++k) {
        const double a = k * kPi / 4.0;
        double c = std::cos(a);
        double s = std::sin(a);
        // Exact zeros keep axis samples on integer offsets.
        if (std::abs(c) < 1e-12) c = 0;
        if (std::abs(s) < 1e-12) s = 0;
        ring.offsets[k] = {radius * c, radius * s};
    }
    return ring;
}

RealRaster corner_intensity(const GrayImage& blurred, const SampleRing& ring) {
    const int w = blurred.width();
    const int h = blurred.height();
    RealRaster out(w, h);
    if (blurred.empty()) return out;

    std::array<Tap, 8> taps;
    int min_dx = 0, max_dx = 0, min_dy = 0, max_dy = 0;
    for (int k = 0; k < 8; ++k) {
        taps[k] = make_tap(ring.offsets[k]);
        min_dx = std::min(min_dx, taps[k].dx);
        min_dy = std::min(min_dy, taps[k].dy);
        max_dx = std::max(max_dx, taps[k].dx + 1);
        max_dy = std::max(max_dy, taps[k].dy + 1);
    }
    const int x_lo = -min_dx;
    const int x_hi = w - max_dx;  // exclusive
    const int y_lo = -min_dy;
    const int y_hi = h - max_dy;
    const ptrdiff_t stride = w;

    for (int y = 0; y < h; ++y) {
        float* dst = out.row(y);
        const bool row_inside = y >= y_lo && y < y_hi;
        for (int x = 0; x < w; ++x) {
            float v[8];
            if (row_inside && x >= x_lo && x < x_hi) {
                const float* base = blurred.row(y) + x;
                for (int k = 0; k < 8; ++k) {
                    const Tap& t = taps[k];
                    const float* p = base + t.dy * stride + t.dx;
                    v[k] = t.single ? p[0]
                                    : t.w00 * p[0] + t.w10 * p[1] + t.w01 * p[stride] + t.w11 * p[stride + 1];
                }
            } else {
                for (int k = 0; k < 8; ++k)
                    v[k] = static_cast<float>(
                        sample_bilinear(blurred, x + ring.offsets[k].x, y + ring.offsets[k].y));
            }
            dst[x] = std::max(xscore_f(v[0], v[2], v[4], v[6]), xscore_f(v[1], v[3], v[5], v[7]));
        }
    }
    return out;
}

std::vector<Peak> nonmax_suppress(const RealRaster& filtered, int radius, float floor) {
    if (radius < 1) throw Error("nonmax_suppress radius must be >= 1");
    std::vector<Peak> peaks;
    const int w = filtered.width();
    const int h = filtered.height();
    for (int y = 0; y < h; ++y) {
        const float* row = filtered.row(y);
        for (int x = 0; x < w; ++x) {
            const float v = row[x];
            if (!(v > floor)) continue;
            const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
            const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
            bool is_max = true;
            for (int yy = y0; yy <= y1 && is_max; ++yy) {
                const float* r = filtered.row(yy);
                for (int xx = x0; xx <= x1; ++xx) {
                    if ((xx != x || yy != y) && r[xx] >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.push_back({x, y, x + 0.5, y + 0.5, v});
        }
    }
    return peaks;
}

int gray_pattern_transitions(const GrayImage& blurred, Point2d center, double radius, int samples) {
    std::vector<double> ring(static_cast<size_t>(samples));
    double mean = 0;
    for (int i = 0; i < samples; ++i) {
        const double a = 2.0 * kPi * i / samples;
        ring[i] = sample_bilinear(blurred, center.x + radius * std::cos(a), center.y + radius * std::sin(a));
        mean += ring[i];
    }
    mean /= samples;
    int transitions = 0;
    for (int i = 0; i < samples; ++i) {
        const bool a = ring[i] >= mean;
        const bool b = ring[(i + 1) % samples] >= mean;
        transitions += a != b;
    }
    return transitions;
}

double min_structure_eigenvalue(const GrayImage& blurred, int cx, int cy, int radius) {
    double sxx = 0, sxy = 0, syy = 0;
    for (int y = cy - radius; y <= cy + radius; ++y) {
        for (int x = cx - radius; x <= cx + radius; ++x) {
            const double gx = 0.5 * (blurred.clamped(x + 1, y) - blurred.clamped(x - 1, y));
            const double gy = 0.5 * (blurred.clamped(x, y + 1) - blurred.clamped(x, y - 1));
            sxx += gx * gx;
            sxy += gx * gy;
            syy += gy * gy;
        }
    }
    const double tr = 0.5 * (sxx + syy);
    const double det = sxx * syy - sxy * sxy;
    return tr - std::sqrt(std::max(0.0, tr * tr - det));
}

int positive_neighbors(const RealRaster& raw, const Peak& peak, int radius, float level) {
    // Raw response sits half a pixel up-left of the box filtered peak, so the ring is
    // centred between ix and ix+1.
    int count = 0;
    const int x0 = peak.ix - radius + 1, x1 = peak.ix + radius;
    const int y0 = peak.iy - radius + 1, y1 = peak.iy + radius;
    for (int x = x0; x <= x1; ++x) count += (raw.clamped(x, y0) > level) + (raw.clamped(x, y1) > level);
    for (int y = y0 + 1; y < y1; ++y) count += (raw.clamped(x0, y) > level) + (raw.clamped(x1, y) > level);
    return count;
}

CascadeStage cascade_check(const Peak& peak, const RealRaster& raw, const GrayImage& blurred, float top_level_max,
                           const CascadeConfig& config) {
    if (!(peak.value > 0) || peak.value < config.rel_threshold * top_level_max) return CascadeStage::intensity;

    if (positive_neighbors(raw, peak, config.pos_radius, static_cast<float>(config.pos_rel_level) * peak.value) >
        config.pos_max)
        return CascadeStage::positive_count;

    if (gray_pattern_transitions(blurred, {peak.x, peak.y}, config.circle_radius, config.circle_samples) != 4)
        return CascadeStage::gray_pattern;

    if (min_structure_eigenvalue(blurred, peak.ix, peak.iy, config.eig_radius) < config.eig_threshold * top_level_max)
        return CascadeStage::eigenvalue;
    return CascadeStage::passed;
}

std::vector<Peak> filter_cascade(const std::vector<Peak>& peaks, const RealRaster& raw, const GrayImage& blurred,
                                 float top_level_max, const CascadeConfig& config) {
    std::vector<Peak> kept;
    for (const Peak& p : peaks)
        if (cascade_check(p, raw, blurred, top_level_max, config) == CascadeStage::passed) kept.push_back(p);
    return kept;
}

Point2d weighted_centroid(const IntensityField& intensity, Point2d center, int window) {
    double sw = 0, sx = 0, sy = 0;
    for (int j = -window; j <= window; ++j) {
        for (int i = -window; i <= window; ++i) {
            const double px = center.x + i;
            const double py = center.y + j;
            const double v = std::max(0.0, intensity({px, py}));
            sw += v;
            sx += v * px;
            sy += v * py;
        }
    }
    if (sw <= 0) return center;
    return {sx / sw, sy / sw};
}

Point2d weighted_centroid(const RealRaster& intensity, Point2d center, int window) {
    return weighted_centroid([&](Point2d q) { return sample_bilinear(intensity, q.x, q.y); }, center, window);
}

Point2d meanshift_refine(const IntensityField& intensity, Point2d seed, const MeanShiftConfig& config) {
    Point2d p = seed;
    for (int it = 0; it < config.max_iterations; ++it) {
        Point2d next = weighted_centroid(intensity, p, config.window);
        const Point2d off = next - seed;
        const double d = off.norm();
        if (d > config.window) next = seed + (config.window / d) * off;
        const double step = distance(next, p);
        p = next;
        if (step < config.tolerance) break;
    }
    return p;
}

Point2d meanshift_refine(const RealRaster& intensity, Point2d seed, const MeanShiftConfig& config) {
    return meanshift_refine([&](Point2d q) { return sample_bilinear(intensity, q.x, q.y); }, seed, config);
}

double corner_intensity_at(const GrayImage& blurred, const SampleRing& ring, Point2d p) {
    double v[8];
    for (int k = 0; k < 8; ++k) v[k] = sample_bilinear(blurred, p.x + ring.offsets[k].x, p.y + ring.offsets[k].y);
    return std::max(xscore(v[0], v[2], v[4], v[6]), xscore(v[1], v[3], v[5], v[7]));
}

double wrap_half_pi(double angle) {
    double r = angle - kPi * std::floor((angle + kPi / 2) / kPi);
    if (r >= kPi / 2) r -= kPi;
    return r;
}

SpokeResult spoke_orientation(const GrayImage& blurred, Point2d location, const SpokeConfig& config) {
    const int n = config.spokes;
    const int quarter = n / 4;
    const int half = n / 2;
    std::vector<double> spoke(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * i / n;
        const double c = std::cos(a), s = std::sin(a);
        double sum = 0;
        for (int k = 1; k <= config.samples; ++k) {
            const double r = config.length * k / config.samples;
            sum += sample_bilinear(blurred, location.x + r * c, location.y + r * s);
        }
        spoke[i] = sum / config.samples;
    }

    // Fold opposite spokes: the score is pi periodic and flips sign under a 90 degree turn.
    std::vector<double> folded(static_cast<size_t>(half));
    for (int i = 0; i < half; ++i)
        folded[i] = (spoke[i] - spoke[(i + quarter) % n]) + (spoke[i + half] - spoke[(i + half + quarter) % n]);

    std::vector<double> smooth(static_cast<size_t>(half), 0.0);
    if (config.smoothing_sigma > 0) {
        const int rad = static_cast<int>(std::ceil(3 * config.smoothing_sigma));
        std::vector<double> kernel(static_cast<size_t>(2 * rad + 1));
        double ksum = 0;
        for (int k = -rad; k <= rad; ++k) {
            kernel[k + rad] = std::exp(-0.5 * k * k / (config.smoothing_sigma * config.smoothing_sigma));
            ksum += kernel[k + rad];
        }
        for (int i = 0; i < half; ++i) {
            double acc = 0;
            for (int k = -rad; k <= rad; ++k) acc += kernel[k + rad] * folded[((i + k) % half + half) % half];
            smooth[i] = acc / ksum;
        }
    } else {
        smooth = folded;
    }

    int best = 0;
    for (int i = 1; i < half; ++i)
        if (smooth[i] > smooth[best]) best = i;
    const double l = smooth[(best + half - 1) % half];
    const double c = smooth[best];
    const double r = smooth[(best + 1) % half];
    double delta = 0;
    const double denom = l - 2 * c + r;
    if (denom < 0) delta = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);

    const double bin = best + delta;
    const double light_angle = bin * kPi / half;

    // Linear interpolation of the raw folded score at the refined bin.
    const double pos = std::fmod(bin + half, static_cast<double>(half));
    const int i0 = static_cast<int>(std::floor(pos)) % half;
    const int i1 = (i0 + 1) % half;
    const double t = pos - std::floor(pos);
    const double raw_peak = (1 - t) * folded[i0] + t * folded[i1];

    SpokeResult res;
    res.orientation = wrap_half_pi(light_angle - kPi / 4);
    res.intensity = c;
    res.contrast = std::max(0.0, 0.5 * raw_peak);
    return res;
}

LevelResponse compute_level_response(const GrayImage& level_image, const XCornerConfig& config) {
    LevelResponse r;
    r.blurred = gaussian_blur_3x3(level_image);
    r.raw = corner_intensity(r.blurred, SampleRing::make(config.ring_radius));
    r.filtered = box_filter_2x2(r.raw);
    return r;
}

std::vector<CornerCandidate> detect_level_corners(const LevelResponse& response, int level, float top_level_max,
                                                  const XCornerConfig& config) {
    const float floor = std::max(static_cast<float>(config.cascade.rel_threshold) * top_level_max, 1e-12f);
    const auto peaks = nonmax_suppress(response.filtered, config.nms_radius, floor);
    const auto kept = filter_cascade(peaks, response.raw, response.blurred, top_level_max, config.cascade);

    std::vector<CornerCandidate> out;
    out.reserve(kept.size());
    for (const Peak& p : kept) {
        const Point2d loc = meanshift_refine(response.raw, {p.x, p.y}, config.meanshift);
        const SpokeResult spokes = spoke_orientation(response.blurred, loc, config.spokes);
        CornerCandidate c;
        c.x = loc.x;
        c.y = loc.y;
        c.level = level;
        c.intensity_raw = p.value;
        c.intensity_spoke = spokes.intensity;
        c.orientation = spokes.orientation;
        c.contrast = spokes.contrast;
        out.push_back(c);
    }
    return out;
}

}  // namespace xchess
