#include "regrade/colorspace.hpp"

#include "regrade/errors.hpp"

namespace regrade {

Matrix3 rgi_matrix() {
    return Matrix3({1, 0, 1,
                    0, 1, 1,
                    0, 0, 1});
}

Matrix3 rgi_matrix_inverse() {
    return Matrix3({1, 0, -1,
                    0, 1, -1,
                    0, 0, 1});
}

ScalarField brightness(const ImageRGB& img) {
    ScalarField out(img.width, img.height);
    const int n = img.pixel_count();
    for (int i = 0; i < n; ++i) {
        out.data[i] = pixel_brightness(img.data.data() + static_cast<std::size_t>(i) * 3);
    }
    return out;
}

PixelMask valid_mask(const ImageRGB& img, double threshold) {
    PixelMask mask(img.width, img.height);
    const int n = img.pixel_count();
    for (int i = 0; i < n; ++i) {
        const double* p = img.data.data() + static_cast<std::size_t>(i) * 3;
        mask.data[i] = (p[0] + p[1] + p[2] > threshold) ? 1 : 0;
    }
    return mask;
}

std::vector<std::array<double, 3>> to_homogeneous_chromaticity(const ImageRGB& img,
                                                               const PixelMask& mask) {
    if (mask.width != img.width || mask.height != img.height) {
        throw ShapeError("to_homogeneous_chromaticity: mask dimension mismatch");
    }
    std::vector<std::array<double, 3>> rows;
    rows.reserve(static_cast<std::size_t>(mask.count()));
    const int n = img.pixel_count();
    for (int i = 0; i < n; ++i) {
        if (!mask.data[i]) continue;
        const double* p = img.data.data() + static_cast<std::size_t>(i) * 3;
        const double intensity = p[0] + p[1] + p[2];
        if (!(intensity > 0.0)) {
            throw DegenerateInputError(
                "to_homogeneous_chromaticity: masked-in pixel has zero intensity");
        }
        rows.push_back({p[0] / intensity, p[1] / intensity, 1.0});
    }
    return rows;
}

} // namespace regrade
