#pragma once

#include <vector>

#include "regrade/image.hpp"

namespace regrade {

/// Per-pixel positive shading factors; exactly 1.0 on pixels the estimation
/// mask excluded.
using ShadingMap = ScalarField;

/// Monotone-capable piecewise cubic Hermite curve mapping brightness to a
/// shading factor. Tangents follow the Fritsch-Carlson limiting scheme, so
/// monotone knot values yield a monotone curve with no overshoot.
struct ShadingCurve {
    std::vector<double> knots;        // strictly ascending, >= 2
    std::vector<double> values;
    std::vector<double> derivatives;  // one tangent per knot

    /// Build a curve through (knots, values), computing tangents.
    /// Throws DegenerateInputError for < 2 knots or non-ascending knots.
    static ShadingCurve fit(std::vector<double> knots, std::vector<double> values);

    /// Cubic Hermite evaluation; outside [front, back] the endpoint value is
    /// returned (clamped extrapolation).
    double eval(double b) const;

    double domain_min() const { return knots.front(); }
    double domain_max() const { return knots.back(); }

    bool operator==(const ShadingCurve& rhs) const = default;
};

/// Per-pixel least-squares shading aligning b_simple to b_target:
/// d_i = <p_i, q_i> / <p_i, p_i>, floored at 1e-6. Pixels outside the mask
/// get 1.0; valid pixels with a zero source triple are treated as invalid
/// and tallied into zero_pixel_tally when given.
ShadingMap solve_shading_lsq(const ImageRGB& b_simple, const ImageRGB& b_target,
                             const PixelMask& mask, int* zero_pixel_tally = nullptr);

/// Summarize (brightness, shading) samples into n_slots uniform brightness
/// bins over the observed [min, max], take each non-empty bin's mean point
/// as a knot, and interpolate. Throws DegenerateInputError when fewer than
/// two bins are populated (a constant curve is the sensible fallback).
ShadingCurve fit_shading_curve(const ScalarField& brightness, const ShadingMap& shading,
                               const PixelMask& mask, int n_slots = 50);

/// argmin_D ||D - d_mapped||_F^2 + lambda ||L D||_F^2 with L the 4-neighbor
/// Laplacian stencil under replicate boundary handling, solved by conjugate
/// gradients on (I + lambda L^T L) d = d_mapped to relative residual 1e-8.
/// lambda = 0 returns d_mapped unchanged.
ShadingMap smooth_shading(const ShadingMap& d_mapped, double lambda);

/// Shading reproduction for a new image: evaluate the curve on the
/// brightness of b_simple, then Laplacian-smooth with weight lambda.
ShadingMap mapped_shading(const ShadingCurve& curve, const ImageRGB& b_simple, double lambda);

} // namespace regrade
