#include "regrade/homography.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "regrade/colorspace.hpp"
#include "regrade/errors.hpp"

namespace regrade {

namespace {

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, 3>;

RowBlock to_eigen(std::span<const std::array<double, 3>> rows) {
    RowBlock m(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m(static_cast<Eigen::Index>(i), 0) = rows[i][0];
        m(static_cast<Eigen::Index>(i), 1) = rows[i][1];
        m(static_cast<Eigen::Index>(i), 2) = rows[i][2];
    }
    return m;
}

Matrix3 from_eigen(const Eigen::Matrix3d& m) {
    Matrix3 out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out(r, c) = m(r, c);
    return out;
}

// QR-based solve with a rank check on the compact R factor, which shares its
// singular values with X.
Eigen::Matrix3d solve_rows(const RowBlock& x, const RowBlock& y) {
    Eigen::HouseholderQR<RowBlock> qr(x);
    const Eigen::Matrix3d r =
        qr.matrixQR().topRows<3>().triangularView<Eigen::Upper>();
#if defined(__GNUC__) && !defined(__clang__)
// GCC cannot see through Eigen's deferred initialization here and reports the
// singular values as possibly uninitialized.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(r);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(2);
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif
    if (!(smin > 1e-10 * smax)) {
        std::ostringstream os;
        os << "least squares: rank-deficient input (singular values " << smax << " .. " << smin
           << "); chromaticities are collinear or constant";
        throw DegenerateInputError(os.str());
    }
    return qr.solve(y);
}

} // namespace

Matrix3 least_squares_solve(std::span<const std::array<double, 3>> x,
                            std::span<const std::array<double, 3>> y) {
    if (x.size() != y.size()) {
        throw ShapeError("least_squares_solve: row count mismatch");
    }
    if (x.size() < 3) {
        throw DegenerateInputError("least_squares_solve: need at least 3 rows");
    }
    return from_eigen(solve_rows(to_eigen(x), to_eigen(y)));
}

AlsResult estimate_homography_als(const ImageRGB& src, const ImageRGB& tgt,
                                  const PixelMask& mask, const AlsSettings& settings) {
    if (!src.same_size(tgt)) {
        throw ShapeError("estimate_homography_als: source/target dimension mismatch");
    }
    if (settings.max_iterations < 1) {
        throw DegenerateInputError("estimate_homography_als: max_iterations must be >= 1");
    }
    if (!(settings.epsilon_per_row > 0.0)) {
        throw DegenerateInputError("estimate_homography_als: epsilon must be > 0");
    }

    // Conversion by C then row normalization collapses to (r, g, 1) directly.
    const auto x_rows = to_homogeneous_chromaticity(src, mask);
    const auto y_rows = to_homogeneous_chromaticity(tgt, mask);
    const Eigen::Index n = static_cast<Eigen::Index>(x_rows.size());
    if (n < 3) {
        std::ostringstream os;
        os << "estimate_homography_als: only " << n << " valid pixels (need >= 3)";
        throw DegenerateInputError(os.str());
    }

    const RowBlock x = to_eigen(x_rows);
    const RowBlock y = to_eigen(y_rows);
    const double epsilon = settings.epsilon_per_row * static_cast<double>(n);

    // D^0 is the per-pixel source/target intensity ratio. Normalizing each row
    // to chromaticity divided out the intensities, and for a pure chromaticity
    // mapping the ratio is exactly the per-row scale the model needs, so the
    // first H solve starts from consistently scaled rows. Any per-pixel shading
    // on top of that is picked up by the alternation.
    Eigen::VectorXd d_total(n);
    {
        Eigen::Index row = 0;
        for (std::size_t i = 0; i < mask.data.size(); ++i) {
            if (!mask.data[i]) continue;
            const double* p = src.data.data() + i * 3;
            const double* q = tgt.data.data() + i * 3;
            d_total(row) = (p[0] + p[1] + p[2]) / (q[0] + q[1] + q[2]);
            ++row;
        }
    }
    RowBlock a_prev = d_total.asDiagonal() * x;

    Eigen::Matrix3d h_total = Eigen::Matrix3d::Identity();

    AlsResult result;
    result.residuals.push_back((a_prev - y).norm());

    for (int it = 1; it <= settings.max_iterations; ++it) {
        const Eigen::Matrix3d h_i = solve_rows(a_prev, y);
        const RowBlock ah = a_prev * h_i;

        Eigen::VectorXd numer = (ah.array() * y.array()).rowwise().sum();
        Eigen::VectorXd denom = ah.rowwise().squaredNorm();
        Eigen::VectorXd d_i(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            d_i(j) = (denom(j) > 0.0) ? numer(j) / denom(j) : 1.0;
        }

        const RowBlock a_next = d_i.asDiagonal() * ah;

        h_total = h_total * h_i;            // post-multiply in iteration order
        d_total = d_total.cwiseProduct(d_i);

        const double delta = (a_next - a_prev).norm();
        a_prev = a_next;
        result.residuals.push_back((a_prev - y).norm());
        result.iterations = it;
        if (delta < epsilon) {
            result.converged = true;
            break;
        }
    }

    // Normalize so h_rg(3,3) = 1; fold the scale into the shading factors so
    // the product D * X * H is unchanged.
    const double scale = h_total(2, 2);
    if (!(std::abs(scale) > 1e-12 * h_total.cwiseAbs().maxCoeff())) {
        throw DegenerateInputError("estimate_homography_als: homography (3,3) entry vanishes");
    }
    h_total /= scale;
    d_total *= scale;

    result.h_rg = from_eigen(h_total);
    result.h = rgi_matrix() * result.h_rg * rgi_matrix_inverse();
    result.final_residual = result.residuals.back();

    result.shading = ScalarField(src.width, src.height, 1.0);
    std::size_t row = 0;
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        if (mask.data[i]) {
            result.shading.data[i] = d_total(static_cast<Eigen::Index>(row));
            ++row;
        }
    }
    return result;
}

ImageRGB apply_homography(const ImageRGB& img, const Matrix3& h) {
    ImageRGB out(img.width, img.height);
    const int n = img.pixel_count();
    for (int i = 0; i < n; ++i) {
        const double* p = img.data.data() + static_cast<std::size_t>(i) * 3;
        double* q = out.data.data() + static_cast<std::size_t>(i) * 3;
        for (int c = 0; c < 3; ++c) {
            q[c] = p[0] * h(0, c) + p[1] * h(1, c) + p[2] * h(2, c);
        }
    }
    return out;
}

} // namespace regrade
