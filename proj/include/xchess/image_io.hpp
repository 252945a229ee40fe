#pragma once

#include <filesystem>

#include "xchess/image.hpp"

namespace xchess {

/// Decodes PNG (8/16 bit, gray/gray+alpha/RGB/RGBA) or binary PGM (P5). The format is
/// sniffed from the file header, not the extension.
RawImage read_image(const std::filesystem::path& path);

/// Convenience: read_image followed by to_gray_normalized.
GrayImage read_gray(const std::filesystem::path& path);

/// Quantizes a [0,1] image to 8 bits (round to nearest).
RawImage quantize_8bit(const GrayImage& img);

void write_png(const std::filesystem::path& path, const RawImage& img);
void write_pgm(const std::filesystem::path& path, const RawImage& img);

/// Dispatches on extension: ".pgm" writes P5, anything else PNG.
void write_image(const std::filesystem::path& path, const RawImage& img);

}  // namespace xchess
