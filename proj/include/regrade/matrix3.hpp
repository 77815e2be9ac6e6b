#pragma once

#include <array>
#include <cstddef>

namespace regrade {

/// 3x3 real matrix, row-major storage. Pixels are treated as row vectors,
/// so a matrix acts on a color by right multiplication: rho^T * M.
struct Matrix3 {
    std::array<double, 9> m{};

    Matrix3() = default;
    explicit Matrix3(const std::array<double, 9>& entries) : m(entries) {}

    static Matrix3 identity();
    static Matrix3 diagonal(double a, double b, double c);

    double& operator()(int row, int col) { return m[static_cast<std::size_t>(row) * 3 + col]; }
    double operator()(int row, int col) const { return m[static_cast<std::size_t>(row) * 3 + col]; }

    Matrix3 operator*(const Matrix3& rhs) const;
    Matrix3 operator*(double s) const;
    Matrix3 operator-(const Matrix3& rhs) const;

    Matrix3 transposed() const;
    double determinant() const;

    /// Inverse via adjugate. Throws DegenerateInputError when the matrix is
    /// singular at the full_rank() tolerance.
    Matrix3 inverse() const;

    double frobenius_norm() const;
    double max_abs() const;

    /// |det| > tol after rescaling the largest |entry| to 1.
    bool full_rank(double tol = 1e-12) const;

    /// rho^T * M for a row-vector color triple.
    std::array<double, 3> apply_row(const std::array<double, 3>& rho) const;

    bool operator==(const Matrix3& rhs) const = default;
};

} // namespace regrade
