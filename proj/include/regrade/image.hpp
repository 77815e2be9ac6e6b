#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace regrade {

/// H x W grid of RGB triples, row-major, channels interleaved.
/// Channel values are nominally in [0,1]; intermediate pipeline results may
/// leave that range until clamped for saving.
struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<double> data; // width * height * 3

    ImageRGB() = default;
    ImageRGB(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

    int pixel_count() const { return width * height; }

    double* pixel(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const double* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    std::array<double, 3> at(int x, int y) const {
        const double* p = pixel(x, y);
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, const std::array<double, 3>& rgb) {
        double* p = pixel(x, y);
        p[0] = rgb[0];
        p[1] = rgb[1];
        p[2] = rgb[2];
    }

    bool same_size(const ImageRGB& other) const {
        return width == other.width && height == other.height;
    }
};

/// Per-pixel scalar grid (brightness fields, shading maps).
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-pixel boolean mask; dimensions match the image it qualifies.
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    PixelMask() = default;
    PixelMask(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    int count() const;

    /// Pixel-wise conjunction. Throws ShapeError on dimension mismatch.
    PixelMask operator&(const PixelMask& rhs) const;
};

/// Every channel clamped to [0,1].
ImageRGB clamp01(ImageRGB img);

/// Box-filter reduction by 2^k per axis. Output dimensions are
/// max(1, floor(dim / 2^k)); blocks clipped by the image edge average over
/// the pixels they actually cover.
ImageRGB downsample(const ImageRGB& img, int k);

} // namespace regrade
