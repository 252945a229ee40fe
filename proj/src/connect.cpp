#include "xchess/connect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace xchess {

std::vector<int> knn_candidates(int query, std::span<const ConnectCorner> corners, int k) {
    const ConnectCorner& q = corners[query];
    std::vector<std::pair<double, int>> cand;
    cand.reserve(corners.size());
    for (int j = 0; j < static_cast<int>(corners.size()); ++j) {
        if (j == query || corners[j].last_level < q.selected_level) continue;
        const Point2d d = corners[j].location - q.location;
        cand.emplace_back(d.x * d.x + d.y * d.y, j);
    }
    const size_t take = std::min(cand.size(), static_cast<size_t>(std::max(k, 0)));
    std::partial_sort(cand.begin(), cand.begin() + static_cast<ptrdiff_t>(take), cand.end());
    std::vector<int> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.push_back(cand[i].second);
    return out;
}

double orientation_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), std::numbers::pi);
    return std::min(d, std::numbers::pi - d);
}

bool orientation_compatible(double a, double b, double tolerance) {
    return orientation_distance(a, b) >= std::numbers::pi / 2 - tolerance;
}

std::optional<EdgeSamples> sample_edge(const GrayImage& blurred, const ConnectCorner& ci, const ConnectCorner& cj,
                                       const EdgeConfig& config) {
    // Canonical endpoint order makes the score independent of argument order.
    const bool swap = std::tie(cj.location.x, cj.location.y) < std::tie(ci.location.x, ci.location.y);
    const ConnectCorner& a = swap ? cj : ci;
    const ConnectCorner& b = swap ? ci : cj;

    const Point2d delta = b.location - a.location;
    const double length = delta.norm();
    if (!(length > 0)) return std::nullopt;
    const Point2d u = (1.0 / length) * delta;
    const Point2d normal{-u.y, u.x};
    const double skip_a = config.skip_scale * std::ldexp(1.0, a.selected_level);
    const double skip_b = config.skip_scale * std::ldexp(1.0, b.selected_level);
    const double usable = length - skip_a - skip_b;
    if (!(usable > 0) || config.samples_n < 1) return std::nullopt;
    const double lateral = std::clamp(config.lateral_fraction * length, config.lateral_min, config.lateral_max);

    EdgeSamples s;
    s.side_a.resize(static_cast<size_t>(config.samples_n));
    s.side_b.resize(static_cast<size_t>(config.samples_n));
    for (int k = 0; k < config.samples_n; ++k) {
        const double t = skip_a + (k + 0.5) / config.samples_n * usable;
        const Point2d p = a.location + t * u;
        const Point2d pa = p + lateral * normal;
        const Point2d pb = p - lateral * normal;
        s.side_a[k] = sample_bilinear(blurred, pa.x, pa.y);
        s.side_b[k] = sample_bilinear(blurred, pb.x, pb.y);
    }
    return s;
}

int kept_terms(int positions, double keep_fraction) {
    const int kept = static_cast<int>(std::floor(keep_fraction * positions + 0.5));
    return std::clamp(kept, 1, std::max(positions, 1));
}

double score_samples(const EdgeSamples& samples, double contrast_sum, const EdgeConfig& config) {
    const auto& A = samples.side_a;
    const auto& B = samples.side_b;
    const int n = static_cast<int>(A.size());
    if (n == 0 || B.size() != A.size() || !(contrast_sum >= config.min_contrast_sum)) return 0.0;

    std::vector<double> diff(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) diff[k] = A[k] - B[k];
    std::vector<double> sorted = diff;
    std::sort(sorted.begin(), sorted.end());
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double sign = 1.0;
    if (median < 0) {
        sign = -1.0;
    } else if (median == 0) {
        double total = 0;
        for (double d : diff) total += d;
        if (total < 0) sign = -1.0;
    }

    std::vector<double> terms(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double par = 0;
        int count = 0;
        for (int j : {k - 1, k + 1}) {
            if (j < 0 || j >= n) continue;
            par += std::abs(A[k] - A[j]) + std::abs(B[k] - B[j]);
            ++count;
        }
        if (count) par /= count;
        terms[k] = sign * diff[k] - par;
    }
    std::sort(terms.begin(), terms.end(), std::greater<>());
    const int kept = kept_terms(n, config.keep_fraction);
    double sum = 0;
    for (int k = 0; k < kept; ++k) sum += terms[k];
    return sum / kept / contrast_sum;
}

double edge_score(const GrayImage& blurred, const ConnectCorner& ci, const ConnectCorner& cj,
                  const EdgeConfig& config) {
    const double contrast_sum = ci.contrast + cj.contrast;
    if (!(contrast_sum >= config.min_contrast_sum)) return 0.0;
    const auto samples = sample_edge(blurred, ci, cj, config);
    if (!samples) return 0.0;
    return score_samples(*samples, contrast_sum, config);
}

EdgeCandidate validate_connection(const GrayImage& blurred, std::span<const ConnectCorner> corners, int i, int j,
                                  const EdgeConfig& config) {
    EdgeCandidate e;
    e.from = i;
    e.to = j;
    e.length = distance(corners[i].location, corners[j].location);
    e.score = edge_score(blurred, corners[i], corners[j], config);
    e.accepted = e.score > 0 && e.score >= config.edge_threshold;
    return e;
}

std::vector<EdgeCandidate> connect_corners(const GrayImage& blurred, std::span<const ConnectCorner> corners,
                                           const EdgeConfig& config) {
    std::vector<EdgeCandidate> edges;
    std::map<std::pair<int, int>, EdgeCandidate> cache;
    for (int i = 0; i < static_cast<int>(corners.size()); ++i) {
        for (int j : knn_candidates(i, corners, config.k_neighbors)) {
            if (!orientation_compatible(corners[i].orientation, corners[j].orientation, config.perp_tolerance))
                continue;
            const auto key = std::minmax(i, j);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, validate_connection(blurred, corners, i, j, config)).first;
            EdgeCandidate e = it->second;
            e.from = i;
            e.to = j;
            edges.push_back(e);
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const EdgeCandidate& a, const EdgeCandidate& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    return edges;
}

}  // namespace xchess
