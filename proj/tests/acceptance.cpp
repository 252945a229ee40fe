// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "scenes.hpp"
#include "xchess/connect.hpp"
#include "xchess/scalesel.hpp"

using namespace xchess;
using namespace xchess::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

// Boards from 4x3 to 9x7 squares, projective poses, 0.3 MP, no blur or noise.
std::vector<Scene> perfect_scenes() {
    const std::vector<std::pair<int, int>> shapes{{3, 4}, {4, 5}, {5, 6}, {5, 7}, {6, 7}, {6, 8}, {7, 8}, {7, 9}};
    std::mt19937_64 rng(101);
    std::vector<Scene> out;
    for (auto [r, c] : shapes) {
        SceneSpec s = random_pose(rng, r, c, 640, 480);
        s.seed = rng();
        out.push_back(render(s));
    }
    return out;
}

Outcome perfect_scenario() {
    const auto scenes = perfect_scenes();
    const Detector detector;
    std::vector<ImageOutcome> outcomes;
    double total = 0;
    for (const Scene& s : scenes) {
        const double t0 = now_ms();
        const Detection det = detector.detect(s.image);
        total += now_ms() - t0;
        outcomes.push_back(classify(as_detected(det), s.truth));
    }
    const Metrics m = summarize(outcomes);
    const bool pass = m.fp == 0 && m.fn == 0 && m.e50 && *m.e50 <= 0.05 && *m.e100 <= 0.2 && total < 5000;
    return {pass, fmt("N=%d FP=%d FN=%d E50=%.4f E100=%.4f runtime=%.0f ms", m.n_images, m.fp, m.fn,
                      m.e50.value_or(-1), m.e100.value_or(-1), total)};
}

Outcome blur_sweep_scenario() {
    const std::vector<double> sigmas{0.5, 1, 2, 4};
    std::mt19937_64 rng(202);
    const Detector detector;
    std::vector<std::vector<ImageOutcome>> per_sigma(sigmas.size());
    const std::vector<std::pair<int, int>> shapes{{5, 6}, {6, 8}, {4, 5}};
    for (auto [r, c] : shapes) {
        SceneSpec s = random_pose(rng, r, c, 368, 272);
        s.seed = rng();
        const auto scenes = blur_sweep(s, sigmas);
        for (size_t i = 0; i < sigmas.size(); ++i)
            per_sigma[i].push_back(classify(as_detected(detector.detect(scenes[i].image)), scenes[i].truth));
    }
    bool pass = true;
    std::string detail;
    double prev_e50 = 0;
    for (size_t i = 0; i < sigmas.size(); ++i) {
        const Metrics m = summarize(per_sigma[i]);
        const double rate = static_cast<double>(m.tp) / m.n_images;
        const double e50 = m.e50.value_or(std::numeric_limits<double>::infinity());
        if (sigmas[i] <= 2 && (rate < 1.0 || e50 > 0.3)) pass = false;
        if (sigmas[i] > 2 && rate < 2.0 / 3.0) pass = false;
        if (m.e50 && e50 < prev_e50) pass = false;
        if (m.e50) prev_e50 = e50;
        detail += fmt("s=%.1f:%d/%d,E50=%.3f ", sigmas[i], m.tp, m.n_images, m.e50.value_or(-1));
    }
    return {pass, detail};
}

bool same_grids(const Detection& a, const Detection& b, double tol, double* worst) {
    if (a.grids.size() != b.grids.size()) return false;
    for (size_t g = 0; g < a.grids.size(); ++g) {
        const GridResult& ga = a.grids[g];
        const GridResult& gb = b.grids[g];
        if (ga.rows != gb.rows || ga.cols != gb.cols) return false;
        for (size_t i = 0; i < ga.corners.size(); ++i) {
            const double d = distance(ga.corners[i].location, gb.corners[i].location);
            *worst = std::max(*worst, d);
            if (d > tol) return false;
        }
    }
    return true;
}

Outcome affine_lighting_invariance() {
    const Detector detector;
    bool pass = true;
    double worst = 0;
    int grids = 0;
    for (const Scene& s : perfect_scenes()) {
        const Detection a = detector.detect(s.image);
        const Detection b = detector.detect(affine_lighting(s.image, 0.5f, 0.25f));
        grids += static_cast<int>(a.grids.size());
        if (!same_grids(a, b, 1e-3, &worst)) pass = false;
    }
    return {pass && grids > 0, fmt("grids=%d max corner shift=%.2e px", grids, worst)};
}

Outcome rotation_consistency() {
    const Detector detector;
    std::mt19937_64 rng(404);
    bool pass = true;
    double worst = 0;
    int compared = 0;
    for (int k = 0; k < 4; ++k) {
        SceneSpec s = random_pose(rng, 5 + k % 2, 7, 400, 300);
        s.blur_sigma = 0.7 * k;
        s.seed = rng();
        const Scene scene = render(s);
        const Detection base = detector.detect(scene.image);
        if (base.grids.size() != 1) {
            pass = false;
            continue;
        }
        for (int q = 1; q < 4; ++q) {
            const Detection rot = detector.detect(rotate_quarter(scene.image, q));
            ++compared;
            if (rot.grids.size() != 1 || rot.grids[0].rows != base.grids[0].rows ||
                rot.grids[0].cols != base.grids[0].cols) {
                pass = false;
                continue;
            }
            for (const DetectedCorner& c : base.grids[0].corners) {
                const Point2d p = rotate_point(c.location, s.width, s.height, q);
                double best = std::numeric_limits<double>::infinity();
                for (const DetectedCorner& r : rot.grids[0].corners) best = std::min(best, distance(p, r.location));
                worst = std::max(worst, best);
            }
        }
    }
    if (worst > 0.5) pass = false;
    return {pass, fmt("rotated detections=%d worst corner distance=%.3f px", compared, worst)};
}

Outcome graph_rule_verifier() {
    const Detector detector;
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> squares(3, 8);
    std::uniform_real_distribution<double> unit(0, 1);
    int violations = 0, grids = 0;
    std::string first;
    for (int i = 0; i < 1000; ++i) {
        SceneSpec s = random_pose(rng, squares(rng), squares(rng), 200, 160, 0.5 + 0.4 * unit(rng), 0.12);
        s.blur_sigma = 2.5 * unit(rng);
        s.noise_sigma = 0.05 * unit(rng);
        s.fg = 0.3 * unit(rng);
        s.bg = 0.6 + 0.4 * unit(rng);
        s.supersample = 2;
        s.seed = rng();
        const Detection det = detector.detect(render(s).image);
        grids += static_cast<int>(det.grids.size());
        const auto bad = verify_grid_rules(det);
        violations += static_cast<int>(bad.size());
        if (!bad.empty() && first.empty()) first = " first: scene " + std::to_string(i) + " " + bad.front();
    }
    return {violations == 0 && grids > 0, fmt("scenes=1000 grids=%d violations=%d", grids, violations) + first};
}

// Detector edge candidates between corners that match ground truth, labelled by the truth
// lattice: neighbours along a board line (true edges) or across a square (diagonals).
struct EdgeCase {
    GrayImage blurred;
    ConnectCorner a, b;
    bool accepted;
};

Outcome nbest_robustness() {
    std::mt19937_64 rng(606);
    const EdgeConfig cfg;
    const Detector detector;
    std::vector<EdgeCase> pos, neg;
    for (int i = 0; i < 40 && (pos.size() < 50 || neg.size() < 50); ++i) {
        SceneSpec s = random_pose(rng, 5, 6, 320, 240, 0.8, 0.1);
        s.blur_sigma = 0.5 * (i % 4);
        s.seed = rng();
        const Scene scene = render(s);
        const Detection det = detector.detect(scene.image);
        const GrayImage blurred = gaussian_blur_3x3(scene.image);
        std::map<int, Cell> truth_cell;
        for (size_t t = 0; t < det.tracks.size(); ++t)
            for (int r = 0; r < scene.truth.rows; ++r)
                for (int c = 0; c < scene.truth.cols; ++c)
                    if (distance(det.tracks[t].location + Point2d{0.5, 0.5},
                                 scene.truth.corners[static_cast<size_t>(r * scene.truth.cols + c)]) < 1.5)
                        truth_cell[static_cast<int>(t)] = {r, c};
        // Board edges the detector proposed, and square diagonals between the same tracks.
        auto add = [&](int i, int j, std::vector<EdgeCase>& bucket) {
            if (bucket.size() >= 50) return;
            const CornerTrack& ta = det.tracks[static_cast<size_t>(i)];
            const CornerTrack& tb = det.tracks[static_cast<size_t>(j)];
            const ConnectCorner a{ta.location, ta.orientation, ta.contrast, ta.selected_level, ta.last_level};
            const ConnectCorner b{tb.location, tb.orientation, tb.contrast, tb.selected_level, tb.last_level};
            if (!sample_edge(blurred, a, b, cfg)) return;
            const double score = edge_score(blurred, a, b, cfg);
            bucket.push_back({blurred, a, b, score > 0 && score >= cfg.edge_threshold});
        };
        for (const EdgeCandidate& e : det.edges) {
            if (e.from > e.to || !truth_cell.count(e.from) || !truth_cell.count(e.to)) continue;
            const int dr = std::abs(truth_cell[e.from].first - truth_cell[e.to].first);
            const int dc = std::abs(truth_cell[e.from].second - truth_cell[e.to].second);
            if (dr + dc == 1) add(e.from, e.to, pos);
        }
        for (const auto& [i, ci] : truth_cell)
            for (const auto& [j, cj] : truth_cell)
                if (i < j && std::abs(ci.first - cj.first) == 1 && std::abs(ci.second - cj.second) == 1)
                    add(i, j, neg);
    }
    std::vector<EdgeCase> cases = pos;
    cases.insert(cases.end(), neg.begin(), neg.end());
    const int corrupt = static_cast<int>(std::floor(0.25 * cfg.samples_n));
    std::uniform_real_distribution<double> unit(0, 1);
    int flips = 0, trials = 0, accepted_true = 0, rejected_diag = 0;
    for (const EdgeCase& c : pos) accepted_true += c.accepted;
    for (const EdgeCase& c : neg) rejected_diag += !c.accepted;
    for (const EdgeCase& c : cases) {
        const EdgeSamples clean = *sample_edge(c.blurred, c.a, c.b, cfg);
        const double contrast = c.a.contrast + c.b.contrast;
        for (int t = 0; t < 20; ++t) {
            EdgeSamples s = clean;
            std::vector<int> idx(static_cast<size_t>(cfg.samples_n));
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (int k = 0; k < corrupt; ++k) {
                const size_t q = static_cast<size_t>(idx[k]);
                // Even trials swap the polarity of a position, odd trials occlude both sides with one value.
                if (t % 2 == 0)
                    std::swap(s.side_a[q], s.side_b[q]);
                else
                    s.side_a[q] = s.side_b[q] = unit(rng);
            }
            const double score = score_samples(s, contrast, cfg);
            const bool accepted = score > 0 && score >= cfg.edge_threshold;
            ++trials;
            if (accepted != c.accepted) ++flips;
        }
    }
    const bool pass = flips == 0 && pos.size() == 50 && neg.size() == 50;
    return {pass, fmt("edges=%zu (true %zu of which accepted %d, diagonal %zu of which rejected %d) corrupted "
                      "positions=%d trials=%d flips=%d",
                      cases.size(), pos.size(), accepted_true, neg.size(), rejected_diag, corrupt, trials, flips)};
}

Outcome equation_oracles() {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> unit(0, 1);
    double worst = 0;
    int failures = 0;
    // xscore identities: zero on a constant ring, invariant to offset, quadratic in gain,
    // symmetric under the ring's half turn.
    for (int i = 0; i < 1000; ++i) {
        const double v[4] = {unit(rng), unit(rng), unit(rng), unit(rng)};
        const double s = xscore(v[0], v[1], v[2], v[3]);
        const double g = 0.1 + 2 * unit(rng), o = unit(rng) - 0.5;
        worst = std::max(worst, std::abs(xscore(v[0] + o, v[1] + o, v[2] + o, v[3] + o) - s));
        worst = std::max(worst, std::abs(xscore(g * v[0], g * v[1], g * v[2], g * v[3]) - g * g * s));
        worst = std::max(worst, std::abs(xscore(v[2], v[3], v[0], v[1]) - s));
        worst = std::max(worst, std::abs(xscore(v[0], v[0], v[0], v[0])));
    }
    if (xscore(1, 0, 1, 0) != 0.5 || xscore(1, 1, 0, 0) != -0.5) ++failures;

    // Level selection against exhaustive search.
    for (int i = 0; i < 1000; ++i) {
        CornerTrack t;
        std::uniform_int_distribution<int> nlev(1, 6);
        const int n = nlev(rng);
        for (int l = 0; l < n; ++l) {
            CornerCandidate c;
            c.level = l;
            c.intensity_spoke = i % 5 == 0 ? std::floor(unit(rng) * 4) * (l + 1) : unit(rng);
            t.members.push_back(c);
        }
        std::shuffle(t.members.begin(), t.members.end(), rng);
        int best = -1;
        double best_v = -1;
        for (int l = 0; l < n; ++l) {
            for (const CornerCandidate& c : t.members) {
                if (c.level != l) continue;
                const double v = c.intensity_spoke / (l + 1);
                if (v > best_v) best_v = v, best = l;
            }
        }
        if (select_level(t) != best) ++failures;
    }

    // Edge score symmetry and affine lighting invariance.
    const EdgeConfig cfg;
    double worst_edge = 0;
    for (int i = 0; i < 50; ++i) {
        SceneSpec s = random_pose(rng, 5, 6, 320, 240);
        s.blur_sigma = unit(rng);
        s.noise_sigma = 0.02;
        s.seed = rng();
        const Scene scene = render(s);
        const GrayImage b0 = gaussian_blur_3x3(scene.image);
        const GrayImage b1 = gaussian_blur_3x3(affine_lighting(scene.image, 0.5f, 0.25f));
        const auto& tc = scene.truth.corners;
        const int a = 0, b = 1;
        const Point2d pa = tc[a] - Point2d{0.5, 0.5}, pb = tc[b] - Point2d{0.5, 0.5};
        const double ca = 0.3 + unit(rng), cb = 0.3 + unit(rng);
        const ConnectCorner A{pa, 0, ca, 0, 2}, B{pb, 0, cb, 0, 2};
        const ConnectCorner A1{pa, 0, 0.5 * ca, 0, 2}, B1{pb, 0, 0.5 * cb, 0, 2};
        const double s0 = edge_score(b0, A, B, cfg);
        worst_edge = std::max(worst_edge, std::abs(s0 - edge_score(b0, B, A, cfg)));
        worst_edge = std::max(worst_edge, std::abs(s0 - edge_score(b1, A1, B1, cfg)));
    }
    const bool pass = failures == 0 && worst <= 1e-5 && worst_edge <= 1e-5;
    return {pass, fmt("xscore max dev=%.1e, level selection mismatches=%d, edge score max dev=%.1e", worst, failures,
                      worst_edge)};
}

Outcome metric_oracle() {
    auto grid = [](int r, int c, double dx) {
        DetectedGrid g{r, c, {}};
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) g.corners.push_back({10.0 * j + dx, 10.0 * i});
        return g;
    };
    GroundTruth t{3, 4, {}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) t.corners.push_back({10.0 * j, 10.0 * i});
    DetectedGrid one_off = grid(3, 4, 0);
    // 3.6*sqrt(2) ~ 5.09 px from its truth and farther from every other truth corner.
    one_off.corners[5] = one_off.corners[5] + Point2d{3.6, 3.6};
    DetectedGrid transposed{4, 3, {}};
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 3; ++i) transposed.corners.push_back({10.0 * j, 10.0 * i});
    DetectedGrid edge_tc = grid(3, 4, 0);
    edge_tc.corners[0].x += 5.0;

    struct Case {
        std::vector<DetectedGrid> det;
        int tp, fp, fn;
    };
    const std::vector<Case> cases{
        {{grid(3, 4, 0)}, 1, 0, 0},
        {{one_off}, 0, 1, 0},
        {{grid(2, 4, 0)}, 0, 0, 1},
        {{}, 0, 0, 1},
        {{transposed}, 1, 0, 0},
        {{edge_tc}, 1, 0, 0},
        // 4.9 px from its own truth but only 5.1 from the next column.
        {{grid(3, 4, 4.9)}, 1, 0, 0},
        {{grid(3, 4, 6)}, 0, 1, 0},
        {{grid(3, 4, 0), grid(3, 4, 0)}, 2, 0, 0},
        {{grid(3, 4, 0), one_off}, 1, 1, 0},
        {{grid(4, 4, 0), grid(3, 4, 0)}, 1, 0, 0},
        {{grid(3, 4, 30)}, 0, 1, 0},
    };
    int wrong = 0;
    for (const Case& c : cases) {
        const ImageOutcome o = classify(c.det, t);
        if (o.tp != c.tp || o.fp != c.fp || o.fn != c.fn) ++wrong;
    }
    if (classify({grid(3, 4, 0)}, t).errors != std::vector<double>(12, 0.0)) ++wrong;
    if (f1(3, 1, 1) != 0.75 || f1(0, 0, 0) != 0.0 || f1(10, 0, 0) != 1.0 || f1(1, 1, 0) != 2.0 / 3.0) ++wrong;
    const auto q1 = quantiles({0.1, 0.2, 0.3});
    const auto q2 = quantiles({5});
    const auto q3 = quantiles({4, 1, 3, 2});
    if (!q1 || q1->q50 != 0.2 || q1->q100 != 0.3) ++wrong;
    if (!q2 || q2->q50 != 5 || q2->q100 != 5) ++wrong;
    if (!q3 || q3->q50 != 2 || q3->q100 != 4) ++wrong;
    if (quantiles({})) ++wrong;
    const int total = static_cast<int>(cases.size()) + 1 + 1 + 4 + 1 + 1;
    return {wrong == 0, fmt("cases=%d wrong=%d", total, wrong)};
}

Outcome throughput() {
    const Detector detector;
    std::mt19937_64 rng(909);
    auto time_scene = [&](int w, int h) {
        SceneSpec s = random_pose(rng, 7, 10, w, h);
        s.supersample = 1;
        s.blur_sigma = 0.8;
        const Scene scene = render(s);
        detector.detect(scene.image);
        std::vector<double> t;
        for (int i = 0; i < 3; ++i) t.push_back(detector.detect(scene.image).runtime_ms);
        return quantiles(t)->q50;
    };
    const double small = time_scene(640, 480);
    const double large = time_scene(4000, 3000);
    return {small < 100 && large < 2000, fmt("0.3 MP R50=%.1f ms, 12 MP R50=%.0f ms", small, large)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 perfect scenario", perfect_scenario},
        {"2 gaussian blur sweep", blur_sweep_scenario},
        {"3 affine lighting invariance", affine_lighting_invariance},
        {"4 rotation consistency", rotation_consistency},
        {"5 graph rule verifier", graph_rule_verifier},
        {"6 n-best robustness", nbest_robustness},
        {"7 equation oracles", equation_oracles},
        {"8 metric oracle", metric_oracle},
        {"9 throughput (soft)", throughput},
    };
    int failed = 0;
    // Optional arguments select criteria by number; the full suite runs by default.
    std::vector<std::string> only(argv + 1, argv + argc);
    int run_count = 0;
    for (const auto& [name, run] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), name.substr(0, name.find(' '))) == only.end())
            continue;
        ++run_count;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%d criteria passed\n", run_count - failed, run_count);
    return failed == 0 ? 0 : 1;
}
