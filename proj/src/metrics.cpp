#include "regrade/metrics.hpp"

#include <cmath>
#include <limits>

#include "regrade/errors.hpp"

namespace regrade {

double psnr(const ImageRGB& a, const ImageRGB& b) {
    if (!a.same_size(b)) {
        throw ShapeError("psnr: image dimension mismatch");
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.data.size());
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace regrade
