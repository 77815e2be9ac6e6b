#pragma once

// Shared fixtures for the test and acceptance suites: a deterministic RNG,
// procedural photo-like images, random well-conditioned transfer matrices,
// and small comparison helpers. Everything here is seed-stable so expected
// values frozen in tests do not drift.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "regrade/image.hpp"
#include "regrade/matrix3.hpp"

namespace testsupport {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0,1); divides the raw 64-bit draw so the stream does not
    // depend on the standard library's distribution implementation.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

// Photo-like procedural image: chromaticity drifts smoothly at image scale
// while a mid-frequency luminance field adds texture. All channels stay
// inside [lo, hi], so every pixel is valid and estimation is well posed.
inline regrade::ImageRGB make_natural(int w, int h, std::uint64_t seed, double lo = 0.03,
                                      double hi = 0.95) {
    Rng rng(seed);
    struct Wave {
        double fu, fv, phase, amp;
    };
    std::array<std::vector<Wave>, 3> chroma;
    for (auto& waves : chroma) {
        for (int j = 0; j < 3; ++j) {
            waves.push_back({rng.uniform(0.3, 1.4), rng.uniform(0.3, 1.4),
                             rng.uniform(0.0, 6.283185307179586), rng.uniform(0.08, 0.22)});
        }
    }
    std::vector<Wave> lum;
    for (int j = 0; j < 4; ++j) {
        lum.push_back({rng.uniform(1.5, 5.5), rng.uniform(1.5, 5.5),
                       rng.uniform(0.0, 6.283185307179586), rng.uniform(0.05, 0.12)});
    }

    regrade::ImageRGB img(w, h);
    const double du = (w > 1) ? 1.0 / (w - 1) : 0.0;
    const double dv = (h > 1) ? 1.0 / (h - 1) : 0.0;
    for (int y = 0; y < h; ++y) {
        const double v = y * dv;
        for (int x = 0; x < w; ++x) {
            const double u = x * du;
            double l = 0.72;
            for (const Wave& wv : lum) {
                l += wv.amp * std::sin(6.283185307179586 * (wv.fu * u + wv.fv * v) + wv.phase);
            }
            double* p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                double base = 0.62;
                for (const Wave& wv : chroma[static_cast<std::size_t>(c)]) {
                    base += wv.amp *
                            std::sin(6.283185307179586 * (wv.fu * u + wv.fv * v) + wv.phase);
                }
                p[c] = std::clamp(base * l, lo, hi);
            }
        }
    }
    return img;
}

// 3x3 singular values via the eigenvalues of M^T M (closed-form cubic).
inline std::array<double, 3> singular_values(const regrade::Matrix3& m) {
    const regrade::Matrix3 g = m.transposed() * m; // symmetric PSD
    // Characteristic cubic of g via the trigonometric method.
    const double p1 = g(0, 1) * g(0, 1) + g(0, 2) * g(0, 2) + g(1, 2) * g(1, 2);
    const double q = (g(0, 0) + g(1, 1) + g(2, 2)) / 3.0;
    const double b00 = g(0, 0) - q, b11 = g(1, 1) - q, b22 = g(2, 2) - q;
    const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1;
    const double p = std::sqrt(std::max(0.0, p2 / 6.0));
    std::array<double, 3> eig{q, q, q};
    if (p > 0.0) {
        const double inv_p = 1.0 / p;
        // det(B / p) / 2
        regrade::Matrix3 b = g;
        b(0, 0) -= q;
        b(1, 1) -= q;
        b(2, 2) -= q;
        double r = b.determinant() * inv_p * inv_p * inv_p / 2.0;
        r = std::clamp(r, -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        eig[0] = q + 2.0 * p * std::cos(phi);
        eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * 3.141592653589793 / 3.0);
        eig[1] = 3.0 * q - eig[0] - eig[2];
    }
    return {std::sqrt(std::max(0.0, eig[0])), std::sqrt(std::max(0.0, eig[1])),
            std::sqrt(std::max(0.0, eig[2]))};
}

inline double condition_number(const regrade::Matrix3& m) {
    const auto sv = singular_values(m);
    return sv[2] > 0.0 ? sv[0] / sv[2] : std::numeric_limits<double>::infinity();
}

// Random transfer matrix: entries uniform in [0.5, 1.5], then |det| scaled
// to 1; resampled until reasonably conditioned.
inline regrade::Matrix3 random_transfer_matrix(Rng& rng, double max_condition = 25.0) {
    for (;;) {
        regrade::Matrix3 m;
        for (double& v : m.m) v = rng.uniform(0.5, 1.5);
        const double det = std::abs(m.determinant());
        if (det < 1e-6) continue;
        m = m * (1.0 / std::cbrt(det));
        if (condition_number(m) <= max_condition) return m;
    }
}

// Relative Frobenius distance after optimally aligning scale:
// min_a ||a*est - ref||_F / ||ref||_F.
inline double scale_aligned_distance(const regrade::Matrix3& est, const regrade::Matrix3& ref) {
    double ee = 0.0, er = 0.0, rr = 0.0;
    for (int i = 0; i < 9; ++i) {
        ee += est.m[i] * est.m[i];
        er += est.m[i] * ref.m[i];
        rr += ref.m[i] * ref.m[i];
    }
    const double a = er / ee;
    double num = 0.0;
    for (int i = 0; i < 9; ++i) {
        const double d = a * est.m[i] - ref.m[i];
        num += d * d;
    }
    return std::sqrt(num / rr);
}

inline double max_abs_diff(const regrade::ImageRGB& a, const regrade::ImageRGB& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        mx = std::max(mx, std::abs(a.data[i] - b.data[i]));
    }
    return mx;
}

// Dense reference pieces for the shading smoother, assembled here so the
// iterative solver is checked against a separate path. The stencil adds the
// four neighbors (edges replicated) and subtracts four times the center.
inline std::vector<std::vector<double>> dense_laplacian(int w, int h) {
    const int n = w * h;
    std::vector<std::vector<double>> l(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    auto idx = [w](int x, int y) { return static_cast<std::size_t>(y * w + x); };
    auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto& row = l[idx(x, y)];
            row[idx(clampi(x - 1, 0, w - 1), y)] += 1.0;
            row[idx(clampi(x + 1, 0, w - 1), y)] += 1.0;
            row[idx(x, clampi(y - 1, 0, h - 1))] += 1.0;
            row[idx(x, clampi(y + 1, 0, h - 1))] += 1.0;
            row[idx(x, y)] -= 4.0;
        }
    }
    return l;
}

// (I + lambda L^T L) as a dense matrix.
inline std::vector<std::vector<double>> dense_system(const std::vector<std::vector<double>>& l,
                                                     double lambda) {
    const std::size_t n = l.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double ltl = 0.0;
            for (std::size_t k = 0; k < n; ++k) ltl += l[k][i] * l[k][j];
            a[i][j] = (i == j ? 1.0 : 0.0) + lambda * ltl;
        }
    }
    return a;
}

// Gaussian elimination with partial pivoting; n stays tiny in tests.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

inline double laplacian_energy(const std::vector<std::vector<double>>& l,
                               const std::vector<double>& d) {
    double e = 0.0;
    for (const auto& row : l) {
        double v = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) v += row[j] * d[j];
        e += v * v;
    }
    return e;
}

// Scratch directory that removes itself.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("regrade_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
