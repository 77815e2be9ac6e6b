#include "regrade/matrix3.hpp"

#include <algorithm>
#include <cmath>

#include "regrade/errors.hpp"

namespace regrade {

Matrix3 Matrix3::identity() {
    return Matrix3({1, 0, 0, 0, 1, 0, 0, 0, 1});
}

Matrix3 Matrix3::diagonal(double a, double b, double c) {
    return Matrix3({a, 0, 0, 0, b, 0, 0, 0, c});
}

Matrix3 Matrix3::operator*(const Matrix3& rhs) const {
    Matrix3 out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(r, k) * rhs(k, c);
            out(r, c) = s;
        }
    }
    return out;
}

Matrix3 Matrix3::operator*(double s) const {
    Matrix3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = m[i] * s;
    return out;
}

Matrix3 Matrix3::operator-(const Matrix3& rhs) const {
    Matrix3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = m[i] - rhs.m[i];
    return out;
}

Matrix3 Matrix3::transposed() const {
    Matrix3 out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out(c, r) = (*this)(r, c);
    return out;
}

double Matrix3::determinant() const {
    const auto& a = m;
    return a[0] * (a[4] * a[8] - a[5] * a[7])
         - a[1] * (a[3] * a[8] - a[5] * a[6])
         + a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Matrix3 Matrix3::inverse() const {
    if (!full_rank()) {
        throw DegenerateInputError("matrix is singular; cannot invert");
    }
    const auto& a = m;
    const double det = determinant();
    Matrix3 inv;
    inv.m = {
        (a[4] * a[8] - a[5] * a[7]), -(a[1] * a[8] - a[2] * a[7]),  (a[1] * a[5] - a[2] * a[4]),
       -(a[3] * a[8] - a[5] * a[6]),  (a[0] * a[8] - a[2] * a[6]), -(a[0] * a[5] - a[2] * a[3]),
        (a[3] * a[7] - a[4] * a[6]), -(a[0] * a[7] - a[1] * a[6]),  (a[0] * a[4] - a[1] * a[3]),
    };
    for (double& v : inv.m) v /= det;
    return inv;
}

double Matrix3::frobenius_norm() const {
    double s = 0.0;
    for (double v : m) s += v * v;
    return std::sqrt(s);
}

double Matrix3::max_abs() const {
    double mx = 0.0;
    for (double v : m) mx = std::max(mx, std::abs(v));
    return mx;
}

bool Matrix3::full_rank(double tol) const {
    const double mx = max_abs();
    if (!(mx > 0.0) || !std::isfinite(mx)) return false;
    Matrix3 scaled = *this * (1.0 / mx);
    return std::abs(scaled.determinant()) > tol;
}

std::array<double, 3> Matrix3::apply_row(const std::array<double, 3>& rho) const {
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
        out[c] = rho[0] * (*this)(0, c) + rho[1] * (*this)(1, c) + rho[2] * (*this)(2, c);
    }
    return out;
}

} // namespace regrade
