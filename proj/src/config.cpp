#include "xchess/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

namespace xchess {

namespace {

using FieldRef = std::variant<int*, double*, bool*, std::optional<Shape>*>;

std::vector<std::pair<std::string, FieldRef>> fields(DetectorConfig& c) {
    auto& x = c.xcorner;
    return {
        {"pyramid.min_dimension", &c.min_dimension},
        {"xcorner.ring_radius", &x.ring_radius},
        {"xcorner.nms_radius", &x.nms_radius},
        {"cascade.rel_threshold", &x.cascade.rel_threshold},
        {"cascade.pos_radius", &x.cascade.pos_radius},
        {"cascade.pos_max", &x.cascade.pos_max},
        {"cascade.pos_rel_level", &x.cascade.pos_rel_level},
        {"cascade.circle_radius", &x.cascade.circle_radius},
        {"cascade.circle_samples", &x.cascade.circle_samples},
        {"cascade.eig_radius", &x.cascade.eig_radius},
        {"cascade.eig_threshold", &x.cascade.eig_threshold},
        {"meanshift.window", &x.meanshift.window},
        {"meanshift.max_iterations", &x.meanshift.max_iterations},
        {"meanshift.tolerance", &x.meanshift.tolerance},
        {"spokes.count", &x.spokes.spokes},
        {"spokes.length", &x.spokes.length},
        {"spokes.samples", &x.spokes.samples},
        {"spokes.smoothing_sigma", &x.spokes.smoothing_sigma},
        {"scalesel.match_radius", &c.match_radius},
        {"connect.k_neighbors", &c.edges.k_neighbors},
        {"connect.perp_tolerance", &c.edges.perp_tolerance},
        {"connect.samples_n", &c.edges.samples_n},
        {"connect.skip_scale", &c.edges.skip_scale},
        {"connect.lateral_fraction", &c.edges.lateral_fraction},
        {"connect.lateral_min", &c.edges.lateral_min},
        {"connect.lateral_max", &c.edges.lateral_max},
        {"connect.keep_fraction", &c.edges.keep_fraction},
        {"connect.edge_threshold", &c.edges.edge_threshold},
        {"connect.min_contrast_sum", &c.edges.min_contrast_sum},
        {"grid.max_degree", &c.votes.max_degree},
        {"grid.square_weight", &c.votes.square_weight},
        {"grid.collinear_weight", &c.votes.collinear_weight},
        {"grid.triangle_weight", &c.votes.triangle_weight},
        {"grid.score_weight", &c.votes.score_weight},
        {"grid.known_shape", &c.known_shape},
        {"grid.expect_single", &c.expect_single},
    };
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw Error("config: bad value for " + key + ": '" + value + "'");
    return out;
}

template <typename T>
std::string format_number(T v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

bool DetectorConfig::operator==(const DetectorConfig& o) const {
    return serialize_config(*this) == serialize_config(o);
}

Shape parse_shape(const std::string& text) {
    const auto sep = text.find_first_of("xX,");
    if (sep == std::string::npos) throw Error("bad shape '" + text + "', expected RxC");
    Shape s;
    s.rows = parse_number<int>("shape", trim(text.substr(0, sep)));
    s.cols = parse_number<int>("shape", trim(text.substr(sep + 1)));
    if (s.rows < 2 || s.cols < 2) throw Error("bad shape '" + text + "': both counts must be >= 2");
    return s;
}

void validate_config(const DetectorConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(std::string("config: ") + what);
    };
    const auto& x = c.xcorner;
    require(c.min_dimension >= 16, "pyramid.min_dimension must be >= 16");
    require(x.ring_radius > 0, "xcorner.ring_radius must be positive");
    require(x.nms_radius >= 1, "xcorner.nms_radius must be >= 1");
    require(x.cascade.rel_threshold >= 0, "cascade.rel_threshold must be >= 0");
    require(x.cascade.pos_radius >= 1, "cascade.pos_radius must be >= 1");
    require(x.cascade.circle_radius > 0, "cascade.circle_radius must be positive");
    require(x.cascade.circle_samples >= 4, "cascade.circle_samples must be >= 4");
    require(x.cascade.eig_radius >= 1, "cascade.eig_radius must be >= 1");
    require(x.meanshift.window >= 1, "meanshift.window must be >= 1");
    require(x.meanshift.max_iterations >= 0, "meanshift.max_iterations must be >= 0");
    require(x.spokes.spokes >= 8 && x.spokes.spokes % 4 == 0, "spokes.count must be a multiple of 4, >= 8");
    require(x.spokes.length > 0 && x.spokes.samples >= 1, "spokes.length and spokes.samples must be positive");
    require(x.spokes.smoothing_sigma >= 0, "spokes.smoothing_sigma must be >= 0");
    require(c.match_radius > 0, "scalesel.match_radius must be positive");
    require(c.edges.k_neighbors >= 1, "connect.k_neighbors must be >= 1");
    require(c.edges.samples_n >= 1, "connect.samples_n must be >= 1");
    require(c.edges.keep_fraction > 0 && c.edges.keep_fraction <= 1, "connect.keep_fraction must be in (0,1]");
    require(c.edges.lateral_min > 0 && c.edges.lateral_min <= c.edges.lateral_max,
            "connect.lateral_min must be positive and <= connect.lateral_max");
    require(c.votes.max_degree >= 2, "grid.max_degree must be >= 2");
}

DetectorConfig parse_config(const std::string& text) {
    DetectorConfig cfg;
    auto table = fields(cfg);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
        if (it == table.end()) throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        std::visit(
            [&](auto* field) {
                using T = std::remove_pointer_t<decltype(field)>;
                if constexpr (std::is_same_v<T, int>) *field = parse_number<int>(key, value);
                else if constexpr (std::is_same_v<T, double>) *field = parse_number<double>(key, value);
                else if constexpr (std::is_same_v<T, bool>) {
                    if (value == "true" || value == "1") *field = true;
                    else if (value == "false" || value == "0") *field = false;
                    else throw Error("config: bad boolean for " + key + ": '" + value + "'");
                } else {
                    if (value == "none" || value.empty()) field->reset();
                    else *field = parse_shape(value);
                }
            },
            it->second);
    }
    validate_config(cfg);
    return cfg;
}

std::string serialize_config(const DetectorConfig& config) {
    DetectorConfig copy = config;
    std::string out;
    for (const auto& [key, ref] : fields(copy)) {
        out += key + " = ";
        std::visit(
            [&](auto* field) {
                using T = std::remove_pointer_t<decltype(field)>;
                if constexpr (std::is_same_v<T, int> || std::is_same_v<T, double>) out += format_number(*field);
                else if constexpr (std::is_same_v<T, bool>) out += *field ? "true" : "false";
                else out += *field ? std::to_string((*field)->rows) + "x" + std::to_string((*field)->cols) : "none";
            },
            ref);
        out += '\n';
    }
    return out;
}

DetectorConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace xchess
