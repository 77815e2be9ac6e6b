#include <doctest.h>

#include <cmath>

#include "regrade/image.hpp"
#include "regrade/matrix3.hpp"
#include "regrade/synth.hpp"

#include "support.hpp"

using regrade::ImageRGB;
using regrade::Matrix3;

namespace {

void channel_stats(const ImageRGB& img, int c, double& mean, double& sd) {
    double sum = 0.0;
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) sum += img.data[i * 3 + static_cast<std::size_t>(c)];
    mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = img.data[i * 3 + static_cast<std::size_t>(c)] - mean;
        var += d * d;
    }
    sd = std::sqrt(var / static_cast<double>(n));
}

} // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("identity homography with unit shading is a no-op") {
    const ImageRGB src = testsupport::make_natural(10, 8, 71);
    const ImageRGB out = regrade::synth_pair(src, Matrix3::identity(), nullptr, false);
    CHECK(testsupport::max_abs_diff(src, out) == 0.0);
}

TEST_CASE("shading multiplies the mapped pixel by f of its brightness") {
    ImageRGB src(1, 1);
    src.set(0, 0, {0.2, 0.2, 0.2});
    const auto f = [](double b) { return 0.5 + b; };
    const ImageRGB out = regrade::synth_pair(src, Matrix3::identity(), f, false);
    // Brightness of the mapped pixel is 0.2, so the factor is 0.7.
    CHECK(out.at(0, 0)[0] == doctest::Approx(0.14).epsilon(1e-14));
    CHECK(out.at(0, 0)[1] == doctest::Approx(0.14).epsilon(1e-14));
    CHECK(out.at(0, 0)[2] == doctest::Approx(0.14).epsilon(1e-14));
}

TEST_CASE("clamp flag limits the output range") {
    ImageRGB src(1, 1);
    src.set(0, 0, {0.8, 0.8, 0.8});
    const Matrix3 gain = Matrix3::identity() * 2.0;
    const ImageRGB raw = regrade::synth_pair(src, gain, nullptr, false);
    CHECK(raw.at(0, 0)[0] == doctest::Approx(1.6));
    const ImageRGB clamped = regrade::synth_pair(src, gain, nullptr, true);
    CHECK(clamped.at(0, 0)[0] == 1.0);
}

TEST_CASE("statistic transfer matches hand-computed two-value data") {
    ImageRGB src(2, 1), ref(2, 1);
    src.set(0, 0, {0.0, 0.0, 0.0});
    src.set(1, 0, {1.0, 1.0, 1.0});
    ref.set(0, 0, {0.25, 0.25, 0.25});
    ref.set(1, 0, {0.75, 0.75, 0.75});
    // Source mean 0.5 and sd 0.5; reference mean 0.5 and sd 0.25, so values
    // contract halfway toward the mean.
    const ImageRGB out = regrade::statistic_transfer(src, ref);
    CHECK(out.at(0, 0)[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.at(1, 0)[0] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("statistic transfer matches reference moments") {
    const ImageRGB src = testsupport::make_natural(40, 32, 72, 0.25, 0.75);
    const ImageRGB ref = testsupport::make_natural(40, 32, 73, 0.3, 0.7);
    const ImageRGB out = regrade::statistic_transfer(src, ref);
    for (int c = 0; c < 3; ++c) {
        double mean_ref, sd_ref, mean_out, sd_out;
        channel_stats(ref, c, mean_ref, sd_ref);
        channel_stats(out, c, mean_out, sd_out);
        // Mid-range inputs avoid the clamp, so the moments carry over.
        CHECK(mean_out == doctest::Approx(mean_ref).epsilon(1e-6));
        CHECK(sd_out == doctest::Approx(sd_ref).epsilon(1e-6));
    }
}

TEST_CASE("a flat source channel shifts by the mean difference") {
    ImageRGB src(2, 1), ref(2, 1);
    src.set(0, 0, {0.4, 0.1, 0.3});
    src.set(1, 0, {0.4, 0.5, 0.3}); // red and blue are constant
    ref.set(0, 0, {0.5, 0.2, 0.1});
    ref.set(1, 0, {0.7, 0.4, 0.3});
    const ImageRGB out = regrade::statistic_transfer(src, ref);
    // Red: constant 0.4 moves to the reference mean 0.6.
    CHECK(out.at(0, 0)[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(out.at(1, 0)[0] == doctest::Approx(0.6).epsilon(1e-14));
    // Blue: constant 0.3 moves to 0.2.
    CHECK(out.at(0, 0)[2] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("statistic transfer output is clamped to the unit range") {
    const ImageRGB src = testsupport::make_natural(16, 16, 74, 0.05, 0.95);
    const ImageRGB ref = testsupport::make_natural(16, 16, 75, 0.0, 1.0);
    const ImageRGB out = regrade::statistic_transfer(src, ref);
    for (double v : out.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_SUITE_END();
