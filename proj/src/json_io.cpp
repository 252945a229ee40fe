#include "xchess/json_io.hpp"

#include <fstream>

namespace xchess {

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw IoError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << value.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Json detection_to_json(const Detection& detection) {
    Json grids = Json::array();
    for (const GridResult& g : detection.grids) {
        Json corners = Json::array();
        for (const DetectedCorner& c : g.corners) {
            corners.push_back({{"x", c.location.x},
                               {"y", c.location.y},
                               {"first_level", c.first_level},
                               {"selected_level", c.selected_level},
                               {"contrast", c.contrast},
                               {"orientation", c.orientation}});
        }
        grids.push_back({{"rows", g.rows}, {"cols", g.cols}, {"corners", std::move(corners)}});
    }
    return {{"grids", std::move(grids)}, {"runtime_ms", detection.runtime_ms}};
}

std::vector<DetectedGrid> detections_from_json(const Json& value) {
    std::vector<DetectedGrid> out;
    try {
        for (const Json& g : value.at("grids")) {
            DetectedGrid d;
            d.rows = g.at("rows").get<int>();
            d.cols = g.at("cols").get<int>();
            for (const Json& c : g.at("corners")) d.corners.push_back({c.at("x").get<double>(), c.at("y").get<double>()});
            if (static_cast<int>(d.corners.size()) != d.rows * d.cols)
                throw Error("detection grid corner count does not match its shape");
            out.push_back(std::move(d));
        }
    } catch (const Json::exception& e) {
        throw Error(std::string("malformed detection JSON: ") + e.what());
    }
    return out;
}

Json truth_to_json(const GroundTruth& truth) {
    Json corners = Json::array();
    for (const Point2d& p : truth.corners) corners.push_back({p.x, p.y});
    return {{"shape", {truth.rows, truth.cols}}, {"corners", std::move(corners)}};
}

GroundTruth truth_from_json(const Json& value) {
    GroundTruth t;
    try {
        t.rows = value.at("shape").at(0).get<int>();
        t.cols = value.at("shape").at(1).get<int>();
        for (const Json& c : value.at("corners")) t.corners.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    } catch (const Json::exception& e) {
        throw Error(std::string("malformed ground truth JSON: ") + e.what());
    }
    if (static_cast<int>(t.corners.size()) != t.rows * t.cols)
        throw Error("ground truth corner count does not match its shape");
    return t;
}

RenderRequest render_request_from_json(const Json& v) {
    RenderRequest r;
    SceneSpec& s = r.spec;
    try {
        r.name = v.value("name", r.name);
        s.squares_rows = v.value("squares_rows", s.squares_rows);
        s.squares_cols = v.value("squares_cols", s.squares_cols);
        s.square_size = v.value("square_size", s.square_size);
        if (v.contains("origin")) s.origin = {v["origin"].at(0).get<double>(), v["origin"].at(1).get<double>()};
        s.blur_sigma = v.value("blur_sigma", s.blur_sigma);
        s.noise_sigma = v.value("noise_sigma", s.noise_sigma);
        s.fg = v.value("fg", s.fg);
        s.bg = v.value("bg", s.bg);
        s.width = v.value("width", s.width);
        s.height = v.value("height", s.height);
        s.supersample = v.value("supersample", s.supersample);
        s.seed = v.value("seed", s.seed);
        if (v.contains("homography") && v.contains("quad")) throw Error("scene: give either homography or quad");
        if (v.contains("homography")) {
            const Json& h = v["homography"];
            if (!h.is_array() || h.size() != 9) throw Error("scene: homography needs 9 numbers");
            for (size_t i = 0; i < 9; ++i) s.homography.h[i] = h[i].get<double>();
        } else if (v.contains("quad")) {
            const Json& q = v["quad"];
            if (!q.is_array() || q.size() != 4) throw Error("scene: quad needs 4 points");
            const double w = s.squares_cols * s.square_size;
            const double h = s.squares_rows * s.square_size;
            const Point2d o = s.origin;
            const std::array<Point2d, 4> src{o, o + Point2d{w, 0}, o + Point2d{w, h}, o + Point2d{0, h}};
            std::array<Point2d, 4> dst;
            for (size_t i = 0; i < 4; ++i) dst[i] = {q[i].at(0).get<double>(), q[i].at(1).get<double>()};
            s.homography = Homography::from_quad(src, dst);
        }
        if (v.contains("sigmas")) r.sigmas = v["sigmas"].get<std::vector<double>>();
    } catch (const Json::exception& e) {
        throw Error(std::string("malformed scene JSON: ") + e.what());
    }
    validate_scene(s);
    return r;
}

Json metrics_to_json(const Metrics& m) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"n_images", m.n_images}, {"tp", m.tp},        {"fp", m.fp},          {"fn", m.fn},
            {"f1", m.f1},             {"e50", opt(m.e50)}, {"e100", opt(m.e100)}, {"r50", opt(m.r50)},
            {"r100", opt(m.r100)}};
}

}  // namespace xchess
