#pragma once

#include <array>
#include <span>
#include <vector>

#include "regrade/image.hpp"
#include "regrade/matrix3.hpp"

namespace regrade {

/// Alternating-least-squares iteration controls.
///
/// The effective convergence tolerance on ||A_i - A_{i-1}||_F is
/// epsilon_per_row * n_rows, so termination behavior does not depend on
/// image resolution.
struct AlsSettings {
    double epsilon_per_row = 1e-6;
    int max_iterations = 50;
};

/// Output of estimate_homography_als.
struct AlsResult {
    Matrix3 h_rg;         // rg-space homography, entry (3,3) normalized to 1
    Matrix3 h;            // RGB-space homography, C * h_rg * C^{-1}
    ScalarField shading;  // accumulated per-pixel scale over the mask; 1.0 off-mask
    int iterations = 0;
    double final_residual = 0.0;         // ||A_final - B'||_F in rg space
    bool converged = false;
    std::vector<double> residuals;       // ||A_i - B'||_F, index 0 = after D^0
};

/// argmin_M ||X M - Y||_F for n x 3 row blocks, solved by orthogonal
/// factorization. Throws DegenerateInputError when n < 3 or X is
/// rank-deficient (smallest singular value < 1e-10 x largest), ShapeError
/// when the row counts differ.
Matrix3 least_squares_solve(std::span<const std::array<double, 3>> x,
                            std::span<const std::array<double, 3>> y);

/// Estimate the chromaticity homography relating src to tgt by alternating
/// least squares over homogeneous rg rows. The mask selects the pixel
/// correspondences (same index in both images) and must exclude
/// zero-intensity pixels in either image.
AlsResult estimate_homography_als(const ImageRGB& src, const ImageRGB& tgt,
                                  const PixelMask& mask, const AlsSettings& settings = {});

/// Apply h to every pixel, rho^T -> rho^T h. Output is not clamped.
ImageRGB apply_homography(const ImageRGB& img, const Matrix3& h);

} // namespace regrade
