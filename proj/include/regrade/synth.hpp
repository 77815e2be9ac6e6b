#pragma once

#include <functional>

#include "regrade/image.hpp"
#include "regrade/matrix3.hpp"

namespace regrade {

/// Build a target image that satisfies the shading-times-homography model
/// exactly: per pixel, b = shading_fn(brightness(rho^T h_true)) * rho^T h_true.
/// shading_fn must be positive over the brightness range it sees; an empty
/// function means unit shading. Pass clamp_output = true for end-to-end
/// fixtures; leave it false when an estimator test needs the unclipped model.
ImageRGB synth_pair(const ImageRGB& src, const Matrix3& h_true,
                    const std::function<double(double)>& shading_fn,
                    bool clamp_output = false);

/// Per-channel mean/variance matching transfer, a lightweight stand-in for
/// foreign global color transfers: out = (src - mean_src) * std_ref/std_src
/// + mean_ref per channel, clamped to [0,1]. A zero-variance source channel
/// passes through shifted by the mean difference.
ImageRGB statistic_transfer(const ImageRGB& src, const ImageRGB& ref);

} // namespace regrade
