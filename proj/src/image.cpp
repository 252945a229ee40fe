#include "xchess/image.hpp"

#include <algorithm>
#include <string>

namespace xchess {

GrayImage to_gray_normalized(const RawImage& raw) {
    if (raw.width <= 0 || raw.height <= 0) throw Error("zero-sized image");
    if (raw.bit_depth != 8 && raw.bit_depth != 16)
        throw Error("unsupported bit depth " + std::to_string(raw.bit_depth));
    if (raw.channels < 1 || raw.channels > 4)
        throw Error("unsupported channel count " + std::to_string(raw.channels));
    const size_t n = static_cast<size_t>(raw.width) * static_cast<size_t>(raw.height);
    if (raw.samples.size() != n * static_cast<size_t>(raw.channels))
        throw Error("sample count does not match image dimensions");

    const double scale = 1.0 / (static_cast<double>((1u << raw.bit_depth) - 1u) * raw.channels);
    GrayImage out(raw.width, raw.height);
    auto dst = out.pixels();
    const uint16_t* src = raw.samples.data();
    for (size_t i = 0; i < n; ++i) {
        uint32_t sum = 0;
        for (int c = 0; c < raw.channels; ++c) sum += *src++;
        dst[i] = static_cast<float>(std::min(1.0, sum * scale));
    }
    return out;
}

GrayImage gaussian_blur_3x3(const GrayImage& img) {
    const int w = img.width();
    const int h = img.height();
    GrayImage tmp(w, h);
    GrayImage out(w, h);
    if (img.empty()) return out;

    for (int y = 0; y < h; ++y) {
        const float* s = img.row(y);
        float* d = tmp.row(y);
        for (int x = 0; x < w; ++x) {
            const float l = s[x > 0 ? x - 1 : 0];
            const float r = s[x + 1 < w ? x + 1 : w - 1];
            d[x] = 0.25f * (l + r) + 0.5f * s[x];
        }
    }
    for (int y = 0; y < h; ++y) {
        const float* up = tmp.row(y > 0 ? y - 1 : 0);
        const float* mid = tmp.row(y);
        const float* down = tmp.row(y + 1 < h ? y + 1 : h - 1);
        float* d = out.row(y);
        for (int x = 0; x < w; ++x) d[x] = 0.25f * (up[x] + down[x]) + 0.5f * mid[x];
    }
    return out;
}

RealRaster box_filter_2x2(const RealRaster& in) {
    const int w = in.width();
    const int h = in.height();
    RealRaster out(w, h);
    for (int y = 0; y < h; ++y) {
        const float* r0 = in.row(y);
        const float* r1 = in.row(y + 1 < h ? y + 1 : y);
        float* d = out.row(y);
        for (int x = 0; x < w; ++x) {
            const int x1 = x + 1 < w ? x + 1 : x;
            d[x] = 0.25f * ((r0[x] + r0[x1]) + (r1[x] + r1[x1]));
        }
    }
    return out;
}

GrayImage downsample_2x2(const GrayImage& img) {
    const int w = img.width() / 2;
    const int h = img.height() / 2;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const float* r0 = img.row(2 * y);
        const float* r1 = img.row(2 * y + 1);
        float* d = out.row(y);
        for (int x = 0; x < w; ++x)
            d[x] = 0.25f * ((r0[2 * x] + r0[2 * x + 1]) + (r1[2 * x] + r1[2 * x + 1]));
    }
    return out;
}

Pyramid build_pyramid(const GrayImage& img, int min_dimension) {
    if (min_dimension < 16) throw Error("pyramid min_dimension must be >= 16");
    if (img.empty()) throw Error("zero-sized image");
    Pyramid pyr;
    pyr.min_dimension = min_dimension;
    pyr.levels.push_back(img);
    while (true) {
        const GrayImage& last = pyr.levels.back();
        if (std::min(last.width() / 2, last.height() / 2) < min_dimension) break;
        pyr.levels.push_back(downsample_2x2(last));
    }
    return pyr;
}

}  // namespace xchess
