#include "xchess/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace xchess {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

// libpng reports errors by longjmp; the message is stashed so the caller can rethrow it
// as an exception once control is back in C++ frames.
thread_local std::string g_png_message;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    g_png_message = msg ? msg : "unknown error";
    png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

RawImage read_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png: cannot allocate read struct");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    if (!info) throw IoError("png: cannot allocate info struct");

    RawImage raw;
    std::vector<unsigned char> buffer;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) throw IoError("png: " + g_png_message);

    png_init_io(png, file.get());
    png_read_info(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
        bit_depth = 8;
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        bit_depth = 8;
    }
    if (bit_depth == 16) png_set_swap(png);  // host little-endian uint16
    png_read_update_info(png, info);

    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.channels = png_get_channels(png, info);
    raw.bit_depth = png_get_bit_depth(png, info);
    const size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * static_cast<size_t>(raw.height));
    rows.resize(static_cast<size_t>(raw.height));
    for (int y = 0; y < raw.height; ++y) rows[y] = buffer.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    const size_t n = static_cast<size_t>(raw.width) * raw.height * raw.channels;
    raw.samples.resize(n);
    if (raw.bit_depth == 16) {
        for (int y = 0; y < raw.height; ++y) {
            const auto* src = reinterpret_cast<const uint16_t*>(rows[y]);
            std::copy(src, src + static_cast<size_t>(raw.width) * raw.channels,
                      raw.samples.begin() + static_cast<size_t>(y) * raw.width * raw.channels);
        }
    } else {
        for (int y = 0; y < raw.height; ++y)
            std::copy(rows[y], rows[y] + static_cast<size_t>(raw.width) * raw.channels,
                      raw.samples.begin() + static_cast<size_t>(y) * raw.width * raw.channels);
    }
    return raw;
}

// P5 header tokens may be separated by arbitrary whitespace and '#' comments.
int read_pnm_int(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) throw IoError("pgm: malformed header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;  // the single whitespace after maxval has been consumed
}

RawImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') throw IoError("pgm: only binary P5 is supported");
    RawImage raw;
    raw.width = read_pnm_int(in);
    raw.height = read_pnm_int(in);
    const int maxval = read_pnm_int(in);
    if (maxval <= 0 || maxval > 65535) throw IoError("pgm: bad maxval");
    raw.channels = 1;
    raw.bit_depth = maxval > 255 ? 16 : 8;
    const size_t n = static_cast<size_t>(raw.width) * raw.height;
    raw.samples.resize(n);
    if (raw.bit_depth == 8) {
        std::vector<unsigned char> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        if (!in) throw IoError("pgm: truncated data");
        std::copy(buf.begin(), buf.end(), raw.samples.begin());
    } else {
        std::vector<unsigned char> buf(2 * n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
        if (!in) throw IoError("pgm: truncated data");
        for (size_t i = 0; i < n; ++i) raw.samples[i] = static_cast<uint16_t>(buf[2 * i] << 8 | buf[2 * i + 1]);
    }
    // Rescale non-standard maxval onto the full bit range.
    const int full = (1 << raw.bit_depth) - 1;
    if (maxval != full) {
        for (auto& s : raw.samples)
            s = static_cast<uint16_t>(std::lround(std::min(1.0, s / static_cast<double>(maxval)) * full));
    }
    return raw;
}

}  // namespace

RawImage read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
    unsigned char sig[8] = {};
    probe.read(reinterpret_cast<char*>(sig), 8);
    const auto got = probe.gcount();
    probe.close();
    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
    if (got >= 2 && sig[0] == 'P' && sig[1] == '5') return read_pgm(path);
    throw IoError("unrecognized image format: " + path.string());
}

GrayImage read_gray(const std::filesystem::path& path) { return to_gray_normalized(read_image(path)); }

RawImage quantize_8bit(const GrayImage& img) {
    RawImage raw;
    raw.width = img.width();
    raw.height = img.height();
    raw.channels = 1;
    raw.bit_depth = 8;
    raw.samples.resize(img.size());
    auto px = img.pixels();
    for (size_t i = 0; i < px.size(); ++i) {
        const float v = std::clamp(px[i], 0.0f, 1.0f);
        raw.samples[i] = static_cast<uint16_t>(std::lround(v * 255.0f));
    }
    return raw;
}

void write_png(const std::filesystem::path& path, const RawImage& img) {
    if (img.channels < 1 || img.channels > 4) throw IoError("png: unsupported channel count");
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png: cannot allocate write struct");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    if (!info) throw IoError("png: cannot allocate info struct");

    static constexpr int kColorTypes[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA, PNG_COLOR_TYPE_RGB,
                                          PNG_COLOR_TYPE_RGBA};
    const size_t row_samples = static_cast<size_t>(img.width) * img.channels;
    std::vector<unsigned char> row(row_samples * (img.bit_depth == 16 ? 2 : 1));
    if (setjmp(png_jmpbuf(png))) throw IoError("png: " + g_png_message);

    png_init_io(png, file.get());
    png_set_IHDR(png, info, img.width, img.height, img.bit_depth, kColorTypes[img.channels - 1],
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (img.bit_depth == 16) png_set_swap(png);

    for (int y = 0; y < img.height; ++y) {
        const uint16_t* src = img.samples.data() + row_samples * y;
        if (img.bit_depth == 16) {
            std::copy(src, src + row_samples, reinterpret_cast<uint16_t*>(row.data()));
        } else {
            for (size_t i = 0; i < row_samples; ++i) row[i] = static_cast<unsigned char>(src[i]);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
}

void write_pgm(const std::filesystem::path& path, const RawImage& img) {
    if (img.channels != 1) throw IoError("pgm: single channel only");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    const int maxval = (1 << img.bit_depth) - 1;
    out << "P5\n" << img.width << ' ' << img.height << '\n' << maxval << '\n';
    if (img.bit_depth == 8) {
        std::vector<unsigned char> buf(img.samples.begin(), img.samples.end());
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<unsigned char> buf(2 * img.samples.size());
        for (size_t i = 0; i < img.samples.size(); ++i) {
            buf[2 * i] = static_cast<unsigned char>(img.samples[i] >> 8);
            buf[2 * i + 1] = static_cast<unsigned char>(img.samples[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_image(const std::filesystem::path& path, const RawImage& img) {
    if (path.extension() == ".pgm")
        write_pgm(path, img);
    else
        write_png(path, img);
}

}  // namespace xchess
