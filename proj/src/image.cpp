#include "regrade/image.hpp"

#include <algorithm>
#include <stdexcept>

#include "regrade/errors.hpp"

namespace regrade {

int PixelMask::count() const {
    int n = 0;
    for (std::uint8_t v : data) n += (v != 0);
    return n;
}

PixelMask PixelMask::operator&(const PixelMask& rhs) const {
    if (width != rhs.width || height != rhs.height) {
        throw ShapeError("mask conjunction: dimension mismatch");
    }
    PixelMask out(width, height);
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.data[i] = (data[i] != 0 && rhs.data[i] != 0) ? 1 : 0;
    }
    return out;
}

ImageRGB clamp01(ImageRGB img) {
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return img;
}

ImageRGB downsample(const ImageRGB& img, int k) {
    if (k < 0) throw std::invalid_argument("downsample: k must be non-negative");
    if (k == 0) return img;

    const int shift = std::min(k, 30);
    const int block = 1 << shift;
    const int ow = std::max(1, img.width >> shift);
    const int oh = std::max(1, img.height >> shift);

    ImageRGB out(ow, oh);
    for (int oy = 0; oy < oh; ++oy) {
        const int y0 = oy * block;
        const int y1 = std::min(img.height, y0 + block);
        for (int ox = 0; ox < ow; ++ox) {
            const int x0 = ox * block;
            const int x1 = std::min(img.width, x0 + block);
            double sum[3] = {0.0, 0.0, 0.0};
            for (int y = y0; y < y1; ++y) {
                const double* row = img.pixel(x0, y);
                for (int x = x0; x < x1; ++x) {
                    sum[0] += row[0];
                    sum[1] += row[1];
                    sum[2] += row[2];
                    row += 3;
                }
            }
            const double n = static_cast<double>(y1 - y0) * (x1 - x0);
            double* po = out.pixel(ox, oy);
            po[0] = sum[0] / n;
            po[1] = sum[1] / n;
            po[2] = sum[2] / n;
        }
    }
    return out;
}

} // namespace regrade
