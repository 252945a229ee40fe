#include "xchess/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "xchess/detector.hpp"
#include "xchess/eval.hpp"
#include "xchess/image_io.hpp"
#include "xchess/json_io.hpp"
#include "xchess/overlay.hpp"

namespace fs = std::filesystem;

namespace xchess {

namespace {

// Usage problems detected after argument parsing.
class UsageError : public Error {
public:
    using Error::Error;
};

int report(std::ostream& err, const std::exception& e, int code) {
    err << "error: " << e.what() << '\n';
    return code;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        return report(err, e, kExitUsage);
    } catch (const IoError& e) {
        return report(err, e, kExitIo);
    } catch (const fs::filesystem_error& e) {
        return report(err, e, kExitIo);
    } catch (const Error& e) {
        return report(err, e, kExitUsage);
    } catch (const std::exception& e) {
        return report(err, e, kExitInternal);
    }
}

DetectorConfig build_config(const std::optional<fs::path>& path, const std::optional<Shape>& shape, bool single) {
    DetectorConfig cfg = path ? load_config(*path) : DetectorConfig{};
    if (shape) cfg.known_shape = shape;
    if (single) cfg.expect_single = true;
    return cfg;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string csv_value(const std::optional<double>& v, int digits) { return v ? format_fixed(*v, digits) : ""; }

std::vector<fs::path> json_files(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

int cmd_detect(const DetectOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (options.images.empty()) throw UsageError("no input images");
        if (!options.out && (options.images.size() > 1 || options.overlay))
            throw UsageError("--out is required for several images or --overlay");
        const Detector detector(build_config(options.config, options.shape, options.single));
        if (options.out) ensure_dir(*options.out);

        int status = kExitOk;
        for (const fs::path& path : options.images) {
            Json result;
            GrayImage image;
            try {
                image = read_gray(path);
            } catch (const Error& e) {
                err << "error: " << path.string() << ": " << e.what() << '\n';
                result = {{"image", path.filename().string()}, {"error", e.what()}};
                status = kExitIo;
            }
            std::optional<Detection> det;
            if (!image.empty()) {
                det = detector.detect(image);
                result = detection_to_json(*det);
            }
            if (!options.out) {
                out << result.dump(2) << '\n';
                continue;
            }
            const std::string stem = path.stem().string();
            write_json(*options.out / (stem + ".json"), result);
            if (options.overlay && det) write_png(*options.out / (stem + "_overlay.png"), render_overlay(image, *det));
            if (det) out << stem << ": " << det->grids.size() << " grid(s)\n";
        }
        return status;
    });
}

int cmd_render(const RenderOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (options.format != "png" && options.format != "pgm") throw UsageError("format must be png or pgm");
        if (options.bit_depth != 8 && options.bit_depth != 16) throw UsageError("bit depth must be 8 or 16");
        const RenderRequest req = render_request_from_json(read_json(options.spec));
        ensure_dir(options.out);

        auto save = [&](const Scene& scene, const std::string& stem) {
            RawImage raw = quantize_8bit(scene.image);
            if (options.bit_depth == 16) {
                raw.bit_depth = 16;
                const auto px = scene.image.pixels();
                for (size_t i = 0; i < px.size(); ++i)
                    raw.samples[i] = static_cast<uint16_t>(std::lround(std::clamp(px[i], 0.0f, 1.0f) * 65535.0f));
            }
            write_image(options.out / (stem + "." + options.format), raw);
            write_json(options.out / (stem + ".json"), truth_to_json(scene.truth));
            out << stem << '\n';
        };
        if (req.sigmas.empty()) {
            save(render(req.spec), req.name);
        } else {
            const auto scenes = blur_sweep(req.spec, req.sigmas);
            for (size_t i = 0; i < scenes.size(); ++i)
                save(scenes[i], req.name + "_s" + format_fixed(req.sigmas[i], 2));
        }
        return kExitOk;
    });
}

namespace {

struct ScenarioResult {
    std::string name;
    Metrics metrics;
};

ScenarioResult evaluate_scenario(const std::string& name, const fs::path& det_dir, const fs::path& truth_dir,
                                 const ClassifyOptions& opts, std::vector<ImageOutcome>& pooled,
                                 std::vector<double>& pooled_runtimes) {
    std::vector<ImageOutcome> outcomes;
    std::vector<double> runtimes;
    for (const fs::path& truth_path : json_files(truth_dir)) {
        const GroundTruth truth = truth_from_json(read_json(truth_path));
        const fs::path det_path = det_dir / truth_path.filename();
        std::vector<DetectedGrid> dets;
        if (fs::exists(det_path)) {
            const Json j = read_json(det_path);
            if (!j.contains("error")) {
                dets = detections_from_json(j);
                if (j.contains("runtime_ms")) runtimes.push_back(j["runtime_ms"].get<double>());
            }
        }
        outcomes.push_back(classify(dets, truth, opts));
    }
    pooled.insert(pooled.end(), outcomes.begin(), outcomes.end());
    pooled_runtimes.insert(pooled_runtimes.end(), runtimes.begin(), runtimes.end());
    return {name, summarize(outcomes, runtimes)};
}

void write_metrics(const std::vector<ScenarioResult>& rows, const std::optional<fs::path>& dir, std::ostream& out) {
    std::string csv = "scenario,N,FP,FN,E50,E100,R50,R100\n";
    Json js = Json::object();
    for (const ScenarioResult& r : rows) {
        const Metrics& m = r.metrics;
        csv += r.name + "," + std::to_string(m.n_images) + "," + std::to_string(m.fp) + "," + std::to_string(m.fn) +
               "," + csv_value(m.e50, 3) + "," + csv_value(m.e100, 3) + "," + csv_value(m.r50, 2) + "," +
               csv_value(m.r100, 2) + "\n";
        js[r.name] = metrics_to_json(m);
    }
    out << csv;
    if (!dir) return;
    ensure_dir(*dir);
    write_json(*dir / "metrics.json", js);
    std::ofstream f(*dir / "metrics.csv", std::ios::binary);
    if (!f) throw IoError("cannot write " + (*dir / "metrics.csv").string());
    f << csv;
}

}  // namespace

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!(options.t_c > 0)) throw UsageError("--tc must be positive");
        if (!fs::is_directory(options.truth)) throw IoError("not a directory: " + options.truth.string());
        if (!fs::is_directory(options.detections)) throw IoError("not a directory: " + options.detections.string());
        const ClassifyOptions opts{options.t_c, options.strict, options.half_pixel};

        std::vector<ScenarioResult> rows;
        std::vector<ImageOutcome> pooled;
        std::vector<double> pooled_runtimes;
        // Subdirectories of the truth directory are scenarios; loose files form one more.
        std::vector<fs::path> subdirs;
        for (const auto& e : fs::directory_iterator(options.truth))
            if (e.is_directory()) subdirs.push_back(e.path());
        std::sort(subdirs.begin(), subdirs.end());
        for (const fs::path& sub : subdirs) {
            const std::string name = sub.filename().string();
            rows.push_back(evaluate_scenario(name, options.detections / name, sub, opts, pooled, pooled_runtimes));
        }
        if (!json_files(options.truth).empty() || subdirs.empty()) {
            const std::string name = fs::absolute(options.truth).lexically_normal().filename().string();
            rows.push_back(evaluate_scenario(name.empty() ? "scenario" : name, options.detections, options.truth,
                                             opts, pooled, pooled_runtimes));
        }
        if (rows.size() > 1) rows.push_back({"all", summarize(pooled, pooled_runtimes)});
        write_metrics(rows, options.out, out);
        return kExitOk;
    });
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (options.images.empty()) throw UsageError("no input images");
        if (options.reps < 3) throw UsageError("--reps must be at least 3");
        const Detector detector(build_config(options.config, options.shape, options.single));
        std::vector<ScenarioResult> rows;
        for (const fs::path& path : options.images) {
            const GrayImage image = read_gray(path);
            detector.detect(image);  // warm-up, discarded
            std::vector<double> times;
            for (int r = 0; r < options.reps; ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                detector.detect(image);
                times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
            }
            Metrics m;
            m.n_images = 1;
            if (auto q = quantiles(times)) {
                m.r50 = q->q50;
                m.r100 = q->q100;
            }
            rows.push_back({path.stem().string(), m});
        }
        std::string csv = "scenario,reps,R50,R100\n";
        Json js = Json::object();
        for (const ScenarioResult& r : rows) {
            csv += r.name + "," + std::to_string(options.reps) + "," + csv_value(r.metrics.r50, 3) + "," +
                   csv_value(r.metrics.r100, 3) + "\n";
            js[r.name] = {{"reps", options.reps}, {"r50", *r.metrics.r50}, {"r100", *r.metrics.r100}};
        }
        out << csv;
        if (options.out) {
            ensure_dir(*options.out);
            write_json(*options.out / "bench.json", js);
        }
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Blur-aware chessboard x-corner detector", "xchess"};
    app.require_subcommand(1);

    auto shape_option = [](CLI::App* sub, std::optional<Shape>& target) {
        sub->add_option_function<std::string>(
               "--shape", [&target](const std::string& s) { target = parse_shape(s); },
               "Known inner-corner shape RxC; other grids are dropped")
            ->type_name("RxC");
    };

    DetectOptions detect;
    std::vector<std::string> detect_images;
    std::string detect_config, detect_out;
    auto* d = app.add_subcommand("detect", "Detect chessboards and write detection JSON");
    d->add_option("images", detect_images, "Input PNG or PGM images")->required();
    d->add_option("--config", detect_config, "Flat key = value configuration file");
    shape_option(d, detect.shape);
    d->add_flag("--single", detect.single, "Keep only the largest grid");
    d->add_option("--out", detect_out, "Output directory (one <stem>.json per image)");
    d->add_flag("--overlay", detect.overlay, "Also write <stem>_overlay.png");

    RenderOptions render_opts;
    std::string render_spec, render_out;
    auto* r = app.add_subcommand("render", "Render synthetic chessboard scenes with ground truth");
    r->add_option("spec", render_spec, "Scene JSON")->required();
    r->add_option("--out", render_out, "Output directory")->required();
    r->add_option("--format", render_opts.format, "png or pgm")->capture_default_str();
    r->add_option("--depth", render_opts.bit_depth, "Bits per sample, 8 or 16")->capture_default_str();

    EvalOptions eval_opts;
    std::string eval_det, eval_truth, eval_out;
    auto* e = app.add_subcommand("eval", "Score detection JSON against ground truth JSON");
    e->add_option("detections", eval_det, "Directory of detection JSON")->required();
    e->add_option("truth", eval_truth, "Directory of ground truth JSON (subdirectories are scenarios)")->required();
    e->add_option("--tc", eval_opts.t_c, "True positive threshold in pixels")->capture_default_str();
    e->add_flag("--strict", eval_opts.strict, "Bijective matching through lattice symmetries");
    e->add_flag("--half-pixel", eval_opts.half_pixel, "Shift ground truth by (0.5, 0.5)");
    e->add_option("--out", eval_out, "Directory for metrics.json and metrics.csv");

    BenchOptions bench;
    std::vector<std::string> bench_images;
    std::string bench_config, bench_out;
    auto* b = app.add_subcommand("bench", "Time the detector on images, excluding IO");
    b->add_option("images", bench_images, "Input images")->required();
    b->add_option("--config", bench_config, "Flat key = value configuration file");
    shape_option(b, bench.shape);
    b->add_flag("--single", bench.single, "Keep only the largest grid");
    b->add_option("--reps", bench.reps, "Timed repetitions after one warm-up")->capture_default_str();
    b->add_option("--out", bench_out, "Directory for bench.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const Error& ex) {
        return report(err, ex, kExitUsage);
    }

    auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
    if (d->parsed()) {
        detect.images.assign(detect_images.begin(), detect_images.end());
        detect.config = opt_path(detect_config);
        detect.out = opt_path(detect_out);
        return cmd_detect(detect, out, err);
    }
    if (r->parsed()) {
        render_opts.spec = render_spec;
        render_opts.out = render_out;
        return cmd_render(render_opts, out, err);
    }
    if (e->parsed()) {
        eval_opts.detections = eval_det;
        eval_opts.truth = eval_truth;
        eval_opts.out = opt_path(eval_out);
        return cmd_eval(eval_opts, out, err);
    }
    bench.images.assign(bench_images.begin(), bench_images.end());
    bench.config = opt_path(bench_config);
    bench.out = opt_path(bench_out);
    return cmd_bench(bench, out, err);
}

}  // namespace xchess
