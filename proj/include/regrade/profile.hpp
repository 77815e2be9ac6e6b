#pragma once

#include <string>

#include "regrade/homography.hpp"
#include "regrade/image.hpp"
#include "regrade/matrix3.hpp"
#include "regrade/shading.hpp"

namespace regrade {

/// Serializable bundle that re-applies a learned color transfer: the
/// RGB-space chromaticity homography plus the brightness-to-shading curve.
/// The exact per-pixel shading of the training pair is deliberately not
/// stored; it is specific to that source image, while the curve transfers.
struct TransferProfile {
    int version = 1;
    Matrix3 h;
    ShadingCurve curve;
    double lambda = 0.1;
    std::string brightness_definition = "mean_rgb";
    std::string provenance; // optional free text; empty means absent

    bool operator==(const TransferProfile& rhs) const = default;
};

enum class ApplyMode { Simple, Shading };

enum class TransferVariant { Simple, ShadingExact, ShadingMapped };

/// Shared knobs for profile extraction and one-shot approximation.
struct ExtractOptions {
    int k_downsample = -1;    // halvings before homography estimation;
                              // negative picks the smallest k with
                              // max dimension <= 256
    double lambda = 0.1;      // shading smoothness weight stored in the profile
    int n_slots = 50;         // brightness bins for the curve fit
    AlsSettings als;
    std::string provenance;
};

/// Smallest k with max(w, h) / 2^k <= max_dim; estimation at thumbnail
/// scale barely moves the recovered homography.
int auto_downsample_k(int width, int height, int max_dim = 256);

/// Learn a transfer profile from a source image and its color-transferred
/// rendition. The homography is estimated on the downsampled pair; the
/// shading stage always runs at full resolution. als_diagnostics, when
/// given, receives the estimation's iteration report.
TransferProfile extract_profile(const ImageRGB& src, const ImageRGB& tgt,
                                const ExtractOptions& opts = {},
                                AlsResult* als_diagnostics = nullptr);

/// Re-apply a profile to any image. Simple mode is the bare homography;
/// shading mode multiplies in the curve-reproduced, smoothed shading.
/// Output is clamped to [0,1].
ImageRGB apply_profile(const ImageRGB& img, const TransferProfile& prof,
                       ApplyMode mode = ApplyMode::Shading);

/// One-shot approximation of the transfer src -> tgt. ShadingExact uses the
/// per-pixel least-squares shading (best possible for this pair);
/// ShadingMapped goes through the reusable curve. Output is clamped.
ImageRGB approximate_transfer(const ImageRGB& src, const ImageRGB& tgt,
                              TransferVariant variant, const ExtractOptions& opts = {});

/// Profile document I/O: UTF-8 JSON with fixed field names. Numeric fields
/// round-trip exactly (shortest decimal representation). Unknown fields are
/// rejected; a version other than 1 raises UnsupportedVersionError;
/// malformed content raises ParseError naming the field path.
std::string serialize_profile(const TransferProfile& prof);
TransferProfile deserialize_profile(const std::string& text);

void write_profile(const TransferProfile& prof, const std::string& path);
TransferProfile read_profile(const std::string& path);

} // namespace regrade
