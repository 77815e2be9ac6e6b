#include "regrade/synth.hpp"

#include <algorithm>
#include <cmath>

#include "regrade/colorspace.hpp"
#include "regrade/errors.hpp"

namespace regrade {

ImageRGB synth_pair(const ImageRGB& src, const Matrix3& h_true,
                    const std::function<double(double)>& shading_fn, bool clamp_output) {
    const bool shaded = static_cast<bool>(shading_fn);
    ImageRGB out(src.width, src.height);
    const int n = src.pixel_count();
    for (int i = 0; i < n; ++i) {
        const double* p = src.data.data() + static_cast<std::size_t>(i) * 3;
        double* q = out.data.data() + static_cast<std::size_t>(i) * 3;
        double mapped[3];
        for (int c = 0; c < 3; ++c) {
            mapped[c] = p[0] * h_true(0, c) + p[1] * h_true(1, c) + p[2] * h_true(2, c);
        }
        const double factor = shaded ? shading_fn(pixel_brightness(mapped)) : 1.0;
        for (int c = 0; c < 3; ++c) q[c] = factor * mapped[c];
    }
    return clamp_output ? clamp01(std::move(out)) : out;
}

ImageRGB statistic_transfer(const ImageRGB& src, const ImageRGB& ref) {
    if (src.pixel_count() == 0 || ref.pixel_count() == 0) {
        throw ShapeError("statistic_transfer: empty image");
    }
    double mean_s[3] = {}, mean_r[3] = {}, var_s[3] = {}, var_r[3] = {};
    const std::size_t ns = static_cast<std::size_t>(src.pixel_count());
    const std::size_t nr = static_cast<std::size_t>(ref.pixel_count());

    for (std::size_t i = 0; i < ns; ++i)
        for (int c = 0; c < 3; ++c) mean_s[c] += src.data[i * 3 + c];
    for (std::size_t i = 0; i < nr; ++i)
        for (int c = 0; c < 3; ++c) mean_r[c] += ref.data[i * 3 + c];
    for (int c = 0; c < 3; ++c) {
        mean_s[c] /= static_cast<double>(ns);
        mean_r[c] /= static_cast<double>(nr);
    }
    for (std::size_t i = 0; i < ns; ++i)
        for (int c = 0; c < 3; ++c) {
            const double d = src.data[i * 3 + c] - mean_s[c];
            var_s[c] += d * d;
        }
    for (std::size_t i = 0; i < nr; ++i)
        for (int c = 0; c < 3; ++c) {
            const double d = ref.data[i * 3 + c] - mean_r[c];
            var_r[c] += d * d;
        }

    double scale[3], offset[3];
    for (int c = 0; c < 3; ++c) {
        const double std_s = std::sqrt(var_s[c] / static_cast<double>(ns));
        const double std_r = std::sqrt(var_r[c] / static_cast<double>(nr));
        if (std_s < 1e-12) {
            // Constant channel: shift by the mean difference.
            scale[c] = 1.0;
            offset[c] = mean_r[c] - mean_s[c];
        } else {
            scale[c] = std_r / std_s;
            offset[c] = mean_r[c] - scale[c] * mean_s[c];
        }
    }

    ImageRGB out(src.width, src.height);
    for (std::size_t i = 0; i < ns; ++i) {
        for (int c = 0; c < 3; ++c) {
            out.data[i * 3 + c] =
                std::clamp(scale[c] * src.data[i * 3 + c] + offset[c], 0.0, 1.0);
        }
    }
    return out;
}

} // namespace regrade
