#pragma once

#include <array>
#include <vector>

#include "regrade/image.hpp"
#include "regrade/matrix3.hpp"

namespace regrade {

/// The RGB-to-RGI conversion matrix C: rho^T * C = (R, G, R+G+B).
Matrix3 rgi_matrix();

/// Closed-form inverse of rgi_matrix().
Matrix3 rgi_matrix_inverse();

/// Mean-channel brightness of one pixel, (R+G+B)/3.
inline double pixel_brightness(const double* rgb) {
    return (rgb[0] + rgb[1] + rgb[2]) / 3.0;
}
inline double pixel_brightness(const std::array<double, 3>& rgb) {
    return pixel_brightness(rgb.data());
}

/// Per-pixel brightness field, (R+G+B)/3.
ScalarField brightness(const ImageRGB& img);

/// Pixel valid iff R+G+B > threshold (strict). Pixels at or below the
/// threshold carry no usable chromaticity.
PixelMask valid_mask(const ImageRGB& img, double threshold = 0.0);

/// Homogeneous rg chromaticity rows (r, g, 1) for every pixel the mask
/// keeps; masked-out pixels contribute no row. Throws DegenerateInputError
/// if a kept pixel has R+G+B <= 0 (the mask must exclude those).
std::vector<std::array<double, 3>> to_homogeneous_chromaticity(const ImageRGB& img,
                                                               const PixelMask& mask);

} // namespace regrade
