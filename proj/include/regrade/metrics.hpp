#pragma once

#include "regrade/image.hpp"

namespace regrade {

/// Peak signal-to-noise ratio in decibels on the [0,1] scale,
/// 10*log10(1/MSE) with MSE pooled over all pixels and all three channels.
/// Identical images return +infinity. Throws ShapeError on dimension
/// mismatch.
double psnr(const ImageRGB& a, const ImageRGB& b);

} // namespace regrade
