#include "xchess/eval.hpp"

#include <algorithm>
#include <limits>

namespace xchess {

namespace {

std::vector<double> nearest_errors(const std::vector<Point2d>& det, const std::vector<Point2d>& truth) {
    std::vector<double> errors;
    errors.reserve(det.size());
    for (const Point2d& p : det) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point2d& q : truth) best = std::min(best, distance(p, q));
        errors.push_back(best);
    }
    return errors;
}

// Bijective matching through the lattice symmetries compatible with the truth shape.
std::vector<double> symmetric_errors(const DetectedGrid& det, const GroundTruth& truth,
                                     const std::vector<Point2d>& tc) {
    const int R = truth.rows, C = truth.cols;
    std::vector<double> best;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int transpose = 0; transpose < 2; ++transpose) {
        const int dr = transpose ? det.cols : det.rows;
        const int dc = transpose ? det.rows : det.cols;
        if (dr != R || dc != C) continue;
        for (int flip_r = 0; flip_r < 2; ++flip_r) {
            for (int flip_c = 0; flip_c < 2; ++flip_c) {
                std::vector<double> errors(static_cast<size_t>(R * C));
                double sum = 0;
                for (int i = 0; i < R; ++i) {
                    for (int j = 0; j < C; ++j) {
                        const int ti = flip_r ? R - 1 - i : i;
                        const int tj = flip_c ? C - 1 - j : j;
                        const int di = transpose ? tj : ti;
                        const int dj = transpose ? ti : tj;
                        const double e = distance(det.corners[di * det.cols + dj], tc[i * C + j]);
                        errors[i * C + j] = e;
                        sum += e;
                    }
                }
                if (sum < best_sum) {
                    best_sum = sum;
                    best = std::move(errors);
                }
            }
        }
    }
    return best;
}

}  // namespace

ImageOutcome classify(const std::vector<DetectedGrid>& detections, const GroundTruth& truth,
                      const ClassifyOptions& options) {
    if (truth.corners.empty()) throw Error("classify: empty ground truth");
    if (static_cast<int>(truth.corners.size()) != truth.rows * truth.cols)
        throw Error("classify: ground truth corner count does not match its shape");
    std::vector<Point2d> tc = truth.corners;
    if (options.half_pixel)
        for (Point2d& p : tc) p = p + Point2d{0.5, 0.5};

    ImageOutcome out;
    for (const DetectedGrid& det : detections) {
        if (static_cast<int>(det.corners.size()) != det.rows * det.cols)
            throw Error("classify: detection corner count does not match its shape");
        const bool same = det.rows == truth.rows && det.cols == truth.cols;
        const bool transposed = det.rows == truth.cols && det.cols == truth.rows;
        if (!same && !transposed) continue;
        const std::vector<double> errors =
            options.strict ? symmetric_errors(det, truth, tc) : nearest_errors(det.corners, tc);
        const bool ok = std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= options.t_c; });
        if (ok) {
            ++out.tp;
            out.errors.insert(out.errors.end(), errors.begin(), errors.end());
        } else {
            ++out.fp;
        }
    }
    if (out.tp == 0 && out.fp == 0) out.fn = 1;
    return out;
}

double f1(int tp, int fp, int fn) {
    if (tp < 0 || fp < 0 || fn < 0) throw Error("f1: negative count");
    const double denom = 2.0 * tp + fp + fn;
    return denom > 0 ? 2.0 * tp / denom : 0.0;
}

std::optional<Quantiles> quantiles(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    return Quantiles{values[(values.size() - 1) / 2], values.back()};
}

Metrics summarize(const std::vector<ImageOutcome>& outcomes, const std::vector<double>& runtimes_ms) {
    Metrics m;
    m.n_images = static_cast<int>(outcomes.size());
    std::vector<double> errors;
    for (const ImageOutcome& o : outcomes) {
        m.tp += o.tp;
        m.fp += o.fp;
        m.fn += o.fn;
        errors.insert(errors.end(), o.errors.begin(), o.errors.end());
    }
    m.f1 = f1(m.tp, m.fp, m.fn);
    if (auto q = quantiles(errors)) {
        m.e50 = q->q50;
        m.e100 = q->q100;
    }
    if (auto q = quantiles(runtimes_ms)) {
        m.r50 = q->q50;
        m.r100 = q->q100;
    }
    return m;
}

}  // namespace xchess
