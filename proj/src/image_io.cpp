#include "regrade/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <vector>

#include <png.h>

#include "regrade/errors.hpp"

namespace regrade {

namespace {

constexpr long long kMaxDimension = 1 << 20;
constexpr long long kMaxPixels = 100'000'000;

std::uint8_t quantize(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5)); // half-up
}

std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// ---- PPM (P6) ----

// Skips whitespace and '#' comments between header tokens.
void skip_ppm_separators(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

long long read_ppm_int(std::istream& in, const char* what) {
    skip_ppm_separators(in);
    long long value = 0;
    int digits = 0;
    int c = in.peek();
    while (c != EOF && std::isdigit(c)) {
        in.get();
        value = value * 10 + (c - '0');
        ++digits;
        if (digits > 9) throw FormatError(std::string("ppm: oversized ") + what + " in header");
        c = in.peek();
    }
    if (digits == 0) throw FormatError(std::string("ppm: missing ") + what + " in header");
    return value;
}

ImageRGB load_ppm(std::istream& in, const std::string& path) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '6') {
        throw FormatError("ppm: not a P6 file: " + path);
    }
    const long long w = read_ppm_int(in, "width");
    const long long h = read_ppm_int(in, "height");
    const long long maxval = read_ppm_int(in, "maxval");
    if (w < 1 || h < 1 || w > kMaxDimension || h > kMaxDimension || w * h > kMaxPixels) {
        std::ostringstream os;
        os << "ppm: bad dimensions " << w << "x" << h << " in " << path;
        throw FormatError(os.str());
    }
    if (maxval != 255) {
        std::ostringstream os;
        os << "ppm: unsupported maxval " << maxval << " (want 255) in " << path;
        throw FormatError(os.str());
    }
    // Exactly one whitespace byte separates the header from the payload.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) {
        throw FormatError("ppm: missing separator after maxval in " + path);
    }

    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
        throw IoError("ppm: truncated pixel data in " + path);
    }

    ImageRGB img(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        img.data[i] = bytes[i] / 255.0;
    }
    return img;
}

void write_ppm(std::ostream& out, const ImageRGB& img) {
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> bytes(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        bytes[i] = quantize(img.data[i]);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

// ---- PNG via libpng ----

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

ImageRGB load_png(const std::string& path) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open " + path);

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png: failed to allocate read struct");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png: failed to allocate info struct");

    if (setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("png: decode failed for " + path);
    }
    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color_type = png_get_color_type(ctx.png, ctx.info);

    if (bit_depth != 8 || (color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_RGBA)) {
        std::ostringstream os;
        os << "png: unsupported image (bit depth " << bit_depth << ", color type " << color_type
           << "; want 8-bit RGB or RGBA) in " << path;
        throw FormatError(os.str());
    }
    if (w < 1 || h < 1 || w > kMaxDimension || h > kMaxDimension ||
        static_cast<long long>(w) * h > kMaxPixels) {
        throw FormatError("png: bad dimensions in " + path);
    }

    const int channels = (color_type == PNG_COLOR_TYPE_RGBA) ? 4 : 3;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * channels);
    ImageRGB img(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(ctx.png, row.data(), nullptr);
        double* dst = img.pixel(0, static_cast<int>(y));
        for (png_uint_32 x = 0; x < w; ++x) {
            const std::uint8_t* src = row.data() + static_cast<std::size_t>(x) * channels;
            dst[0] = src[0] / 255.0;
            dst[1] = src[1] / 255.0;
            dst[2] = src[2] / 255.0; // alpha dropped
            dst += 3;
        }
    }
    png_read_end(ctx.png, nullptr);
    return img;
}

void save_png(const ImageRGB& img, const std::string& path) {
    PngWriteCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot write " + path);

    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png: failed to allocate write struct");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png: failed to allocate info struct");

    if (setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("png: encode failed for " + path);
    }
    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        const double* src = img.pixel(0, y);
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = quantize(src[i]);
        }
        png_write_row(ctx.png, row.data());
    }
    png_write_end(ctx.png, nullptr);
    if (std::fflush(ctx.fp) != 0) throw IoError("png: flush failed for " + path);
}

bool has_png_magic(const unsigned char* bytes, std::size_t n) {
    static const unsigned char magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return n >= 8 && std::memcmp(bytes, magic, 8) == 0;
}

} // namespace

ImageRGB load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    unsigned char head[8] = {0};
    in.read(reinterpret_cast<char*>(head), sizeof(head));
    const std::size_t got = static_cast<std::size_t>(in.gcount());

    if (has_png_magic(head, got)) {
        in.close();
        return load_png(path);
    }
    if (got >= 2 && head[0] == 'P' && head[1] == '6') {
        in.clear();
        in.seekg(0);
        return load_ppm(in, path);
    }
    std::ostringstream os;
    os << "unsupported image format in " << path << " (header starts \"";
    for (std::size_t i = 0; i < got; ++i) {
        const unsigned char c = head[i];
        if (c >= 0x20 && c < 0x7f) {
            os << static_cast<char>(c);
        } else {
            os << "\\x" << std::hex << std::setw(2) << std::setfill('0')
               << static_cast<int>(c) << std::dec;
        }
    }
    os << "\")";
    throw FormatError(os.str());
}

void save_image(const ImageRGB& img, const std::string& path) {
    if (img.width < 1 || img.height < 1) {
        throw ShapeError("save_image: empty image");
    }
    const std::string ext = lower_extension(path);
    const std::string tmp = path + ".tmp";

    if (ext == ".ppm") {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + tmp);
            write_ppm(out, img);
            out.flush();
            if (!out) throw IoError("write failed for " + tmp);
        }
    } else if (ext == ".png") {
        save_png(img, tmp);
    } else {
        throw FormatError("unsupported output extension '" + ext + "' for " + path +
                          " (supported: .ppm, .png)");
    }

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

} // namespace regrade
