#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "xchess/grid.hpp"

namespace xchess {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitInternal = 3 };

struct DetectOptions {
    std::vector<std::filesystem::path> images;
    std::optional<std::filesystem::path> config;
    std::optional<Shape> shape;
    bool single = false;
    /// Output directory; without it a single image's JSON goes to stdout.
    std::optional<std::filesystem::path> out;
    bool overlay = false;
};

struct RenderOptions {
    std::filesystem::path spec;
    std::filesystem::path out;
    /// "png" or "pgm".
    std::string format = "png";
    int bit_depth = 8;
};

struct EvalOptions {
    std::filesystem::path detections;
    std::filesystem::path truth;
    double t_c = 5.0;
    bool strict = false;
    bool half_pixel = false;
    std::optional<std::filesystem::path> out;
};

struct BenchOptions {
    std::vector<std::filesystem::path> images;
    std::optional<std::filesystem::path> config;
    std::optional<Shape> shape;
    bool single = false;
    int reps = 5;
    std::optional<std::filesystem::path> out;
};

int cmd_detect(const DetectOptions& options, std::ostream& out, std::ostream& err);
int cmd_render(const RenderOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xchess
