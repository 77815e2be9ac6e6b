#pragma once

#include <string>

#include "regrade/image.hpp"

namespace regrade {

/// Load a binary PPM (P6, maxval 255) or an 8-bit RGB/RGBA PNG; alpha is
/// dropped. The format is detected from the file's magic bytes. Each 8-bit
/// channel c maps to c/255 exactly.
///
/// Throws IoError for unreadable/truncated files and FormatError for
/// unsupported formats or bit depths.
ImageRGB load_image(const std::string& path);

/// Save as PPM (".ppm") or PNG (".png"), chosen by the path's extension.
/// Channels are clamped to [0,1] and quantized with half-up rounding.
/// The file is written to a temporary sibling and renamed into place.
void save_image(const ImageRGB& img, const std::string& path);

} // namespace regrade
