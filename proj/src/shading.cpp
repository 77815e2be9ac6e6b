#include "regrade/shading.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "regrade/colorspace.hpp"
#include "regrade/errors.hpp"

namespace regrade {

namespace {

constexpr double kShadingFloor = 1e-6;

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// One-sided three-point endpoint tangent with the usual pchip limiting.
double endpoint_tangent(double h0, double h1, double d0, double d1) {
    double t = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(t) != sign(d0)) {
        t = 0.0;
    } else if (sign(d0) != sign(d1) && std::abs(t) > 3.0 * std::abs(d0)) {
        t = 3.0 * d0;
    }
    return t;
}

} // namespace

ShadingCurve ShadingCurve::fit(std::vector<double> knots, std::vector<double> values) {
    const std::size_t n = knots.size();
    if (n < 2 || values.size() != n) {
        throw DegenerateInputError("shading curve: need >= 2 knots with matching values");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(knots[i] > knots[i - 1])) {
            throw DegenerateInputError("shading curve: knots must be strictly ascending");
        }
    }

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = knots[i + 1] - knots[i];
        delta[i] = (values[i + 1] - values[i]) / h[i];
    }

    std::vector<double> m(n);
    if (n == 2) {
        m[0] = m[1] = delta[0];
    } else {
        m[0] = endpoint_tangent(h[0], h[1], delta[0], delta[1]);
        m[n - 1] = endpoint_tangent(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m[i] = 0.0;
            } else {
                // Weighted harmonic mean of the neighboring secants keeps the
                // interpolant monotone (Fritsch-Carlson region).
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
    }

    ShadingCurve curve;
    curve.knots = std::move(knots);
    curve.values = std::move(values);
    curve.derivatives = std::move(m);
    return curve;
}

double ShadingCurve::eval(double b) const {
    if (b <= knots.front()) return values.front();
    if (b >= knots.back()) return values.back();

    // Rightmost segment whose left knot is <= b.
    const auto it = std::upper_bound(knots.begin(), knots.end(), b);
    const std::size_t seg = static_cast<std::size_t>(it - knots.begin()) - 1;

    const double h = knots[seg + 1] - knots[seg];
    const double t = (b - knots[seg]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * values[seg] + h10 * h * derivatives[seg] +
           h01 * values[seg + 1] + h11 * h * derivatives[seg + 1];
}

ShadingMap solve_shading_lsq(const ImageRGB& b_simple, const ImageRGB& b_target,
                             const PixelMask& mask, int* zero_pixel_tally) {
    if (!b_simple.same_size(b_target)) {
        throw ShapeError("solve_shading_lsq: image dimension mismatch");
    }
    if (mask.width != b_simple.width || mask.height != b_simple.height) {
        throw ShapeError("solve_shading_lsq: mask dimension mismatch");
    }

    ShadingMap d(b_simple.width, b_simple.height, 1.0);
    int zeros = 0;
    const int n = b_simple.pixel_count();
    for (int i = 0; i < n; ++i) {
        if (!mask.data[i]) continue;
        const double* p = b_simple.data.data() + static_cast<std::size_t>(i) * 3;
        const double* q = b_target.data.data() + static_cast<std::size_t>(i) * 3;
        const double pp = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if (pp == 0.0) {
            ++zeros;
            continue; // keeps 1.0
        }
        const double pq = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        d.data[i] = std::max(kShadingFloor, pq / pp);
    }
    if (zero_pixel_tally) *zero_pixel_tally = zeros;
    return d;
}

ShadingCurve fit_shading_curve(const ScalarField& brightness, const ShadingMap& shading,
                               const PixelMask& mask, int n_slots) {
    if (brightness.width != shading.width || brightness.height != shading.height ||
        brightness.width != mask.width || brightness.height != mask.height) {
        throw ShapeError("fit_shading_curve: field dimension mismatch");
    }
    if (n_slots < 2) {
        throw DegenerateInputError("fit_shading_curve: need at least 2 slots");
    }

    double bmin = 0.0, bmax = 0.0;
    bool any = false;
    const std::size_t n = brightness.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask.data[i]) continue;
        const double b = brightness.data[i];
        if (!any) {
            bmin = bmax = b;
            any = true;
        } else {
            bmin = std::min(bmin, b);
            bmax = std::max(bmax, b);
        }
    }
    if (!any || !(bmax > bmin)) {
        throw DegenerateInputError(
            "fit_shading_curve: fewer than 2 distinct brightness values; "
            "a constant curve is the appropriate fallback");
    }

    const double width = (bmax - bmin) / n_slots;
    std::vector<double> sum_b(static_cast<std::size_t>(n_slots), 0.0);
    std::vector<double> sum_d(static_cast<std::size_t>(n_slots), 0.0);
    std::vector<long long> count(static_cast<std::size_t>(n_slots), 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask.data[i]) continue;
        int slot = static_cast<int>((brightness.data[i] - bmin) / width);
        slot = std::clamp(slot, 0, n_slots - 1);
        sum_b[static_cast<std::size_t>(slot)] += brightness.data[i];
        sum_d[static_cast<std::size_t>(slot)] += shading.data[i];
        ++count[static_cast<std::size_t>(slot)];
    }

    std::vector<double> knots, values;
    for (int s = 0; s < n_slots; ++s) {
        if (count[static_cast<std::size_t>(s)] == 0) continue; // empty slots skipped
        const double cn = static_cast<double>(count[static_cast<std::size_t>(s)]);
        const double kb = sum_b[static_cast<std::size_t>(s)] / cn;
        const double kd = sum_d[static_cast<std::size_t>(s)] / cn;
        // Guard against slot means colliding when the range is at rounding scale.
        if (!knots.empty() && !(kb > knots.back())) continue;
        knots.push_back(kb);
        values.push_back(kd);
    }
    if (knots.size() < 2) {
        throw DegenerateInputError(
            "fit_shading_curve: fewer than 2 non-empty brightness slots; "
            "a constant curve is the appropriate fallback");
    }
    return ShadingCurve::fit(std::move(knots), std::move(values));
}

namespace {

// 4-neighbor Laplacian with clamp-to-edge sampling.
void apply_laplacian(const ScalarField& in, ScalarField& out) {
    const int w = in.width;
    const int h = in.height;
    for (int y = 0; y < h; ++y) {
        const int yu = std::max(0, y - 1);
        const int yd = std::min(h - 1, y + 1);
        for (int x = 0; x < w; ++x) {
            const int xl = std::max(0, x - 1);
            const int xr = std::min(w - 1, x + 1);
            out.at(x, y) = in.at(xl, y) + in.at(xr, y) + in.at(x, yu) + in.at(x, yd) -
                           4.0 * in.at(x, y);
        }
    }
}

// True adjoint of the clamped-boundary stencil, built by scattering each
// output coefficient back to the cells it read.
void apply_laplacian_adjoint(const ScalarField& in, ScalarField& out) {
    const int w = in.width;
    const int h = in.height;
    std::fill(out.data.begin(), out.data.end(), 0.0);
    for (int y = 0; y < h; ++y) {
        const int yu = std::max(0, y - 1);
        const int yd = std::min(h - 1, y + 1);
        for (int x = 0; x < w; ++x) {
            const int xl = std::max(0, x - 1);
            const int xr = std::min(w - 1, x + 1);
            const double v = in.at(x, y);
            out.at(xl, y) += v;
            out.at(xr, y) += v;
            out.at(x, yu) += v;
            out.at(x, yd) += v;
            out.at(x, y) -= 4.0 * v;
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

ShadingMap smooth_shading(const ShadingMap& d_mapped, double lambda) {
    if (lambda < 0.0) {
        throw DegenerateInputError("smooth_shading: lambda must be >= 0");
    }
    if (lambda == 0.0 || d_mapped.data.empty()) return d_mapped;

    const int w = d_mapped.width;
    const int h = d_mapped.height;
    const std::size_t n = d_mapped.data.size();

    ScalarField lap(w, h), ltl(w, h);
    auto apply_op = [&](const ScalarField& v, ScalarField& out) {
        apply_laplacian(v, lap);
        apply_laplacian_adjoint(lap, ltl);
        for (std::size_t i = 0; i < n; ++i) {
            out.data[i] = v.data[i] + lambda * ltl.data[i];
        }
    };

    const std::vector<double>& b = d_mapped.data;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return d_mapped;

    // CG on the SPD system, warm-started at the data term.
    ScalarField x = d_mapped;
    ScalarField ax(w, h);
    apply_op(x, ax);

    std::vector<double> r(n), p(n), ap(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax.data[i];
    p = r;
    double rs = dot(r, r);

    const double tol = 1e-8 * bnorm;
    const std::size_t max_iter = std::max<std::size_t>(n, 100);
    ScalarField pf(w, h), apf(w, h);
    for (std::size_t it = 0; it < max_iter && std::sqrt(rs) > tol; ++it) {
        pf.data = p;
        apply_op(pf, apf);
        ap = apf.data;
        const double alpha = rs / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x.data[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rs_new = dot(r, r);
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return x;
}

ShadingMap mapped_shading(const ShadingCurve& curve, const ImageRGB& b_simple, double lambda) {
    ShadingMap d(b_simple.width, b_simple.height);
    const int n = b_simple.pixel_count();
    for (int i = 0; i < n; ++i) {
        const double b = pixel_brightness(b_simple.data.data() + static_cast<std::size_t>(i) * 3);
        d.data[i] = curve.eval(b);
    }
    return smooth_shading(d, lambda);
}

} // namespace regrade
