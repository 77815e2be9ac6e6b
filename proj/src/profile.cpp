#include "regrade/profile.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "regrade/colorspace.hpp"
#include "regrade/errors.hpp"

namespace regrade {

namespace {

using json = nlohmann::ordered_json;

// Rethrows estimation failures with the pipeline stage named.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(std::string(name) + ": " + e.what());
    }
}

ImageRGB multiply_shading(const ImageRGB& img, const ScalarField& d) {
    ImageRGB out(img.width, img.height);
    const int n = img.pixel_count();
    for (int i = 0; i < n; ++i) {
        const double f = d.data[i];
        const double* p = img.data.data() + static_cast<std::size_t>(i) * 3;
        double* q = out.data.data() + static_cast<std::size_t>(i) * 3;
        q[0] = f * p[0];
        q[1] = f * p[1];
        q[2] = f * p[2];
    }
    return out;
}

int resolve_k(int k_downsample, const ImageRGB& img) {
    if (k_downsample >= 0) return k_downsample;
    return auto_downsample_k(img.width, img.height);
}

Matrix3 estimate_h(const ImageRGB& src, const ImageRGB& tgt, const ExtractOptions& opts,
                   AlsResult* out_result = nullptr) {
    const int k = resolve_k(opts.k_downsample, src);
    const ImageRGB ds = downsample(src, k);
    const ImageRGB dt = downsample(tgt, k);
    AlsResult als = stage("homography stage", [&] {
        return estimate_homography_als(ds, dt, valid_mask(ds) & valid_mask(dt), opts.als);
    });
    if (out_result) *out_result = als;
    return als.h;
}

} // namespace

int auto_downsample_k(int width, int height, int max_dim) {
    int k = 0;
    int dim = std::max(width, height);
    while (dim > max_dim) {
        dim = (dim + 1) / 2;
        ++k;
    }
    return k;
}

TransferProfile extract_profile(const ImageRGB& src, const ImageRGB& tgt,
                                const ExtractOptions& opts, AlsResult* als_diagnostics) {
    if (!src.same_size(tgt)) {
        throw ShapeError("extract_profile: source/target dimension mismatch");
    }

    TransferProfile prof;
    prof.h = estimate_h(src, tgt, opts, als_diagnostics);

    // Shading is always estimated at full resolution.
    const ImageRGB b_simple = apply_homography(src, prof.h);
    const PixelMask mask = valid_mask(src) & valid_mask(tgt);
    const ShadingMap d = stage("shading stage", [&] {
        return solve_shading_lsq(b_simple, tgt, mask);
    });
    prof.curve = stage("curve stage", [&] {
        return fit_shading_curve(brightness(b_simple), d, mask, opts.n_slots);
    });
    prof.lambda = opts.lambda;
    prof.provenance = opts.provenance;
    return prof;
}

ImageRGB apply_profile(const ImageRGB& img, const TransferProfile& prof, ApplyMode mode) {
    ImageRGB b_simple = apply_homography(img, prof.h);
    if (mode == ApplyMode::Simple) {
        return clamp01(std::move(b_simple));
    }
    const ShadingMap d = mapped_shading(prof.curve, b_simple, prof.lambda);
    return clamp01(multiply_shading(b_simple, d));
}

ImageRGB approximate_transfer(const ImageRGB& src, const ImageRGB& tgt,
                              TransferVariant variant, const ExtractOptions& opts) {
    if (!src.same_size(tgt)) {
        throw ShapeError("approximate_transfer: source/target dimension mismatch");
    }
    if (variant == TransferVariant::ShadingMapped) {
        return apply_profile(src, extract_profile(src, tgt, opts), ApplyMode::Shading);
    }

    const Matrix3 h = estimate_h(src, tgt, opts);
    ImageRGB b_simple = apply_homography(src, h);
    if (variant == TransferVariant::Simple) {
        return clamp01(std::move(b_simple));
    }
    const PixelMask mask = valid_mask(src) & valid_mask(tgt);
    const ShadingMap d = stage("shading stage", [&] {
        return solve_shading_lsq(b_simple, tgt, mask);
    });
    return clamp01(multiply_shading(b_simple, d));
}

// ---- profile documents ----

namespace {

const json* find_field(const json& obj, const char* name) {
    auto it = obj.find(name);
    return it == obj.end() ? nullptr : &*it;
}

double require_finite_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ParseError(path + ": expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ParseError(path + ": number is not finite");
    }
    return d;
}

std::vector<double> require_number_array(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw ParseError(path + ": expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(require_finite_number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* name : allowed) {
            if (it.key() == name) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError(prefix + it.key() + ": unknown field");
        }
    }
}

} // namespace

std::string serialize_profile(const TransferProfile& prof) {
    json doc;
    doc["version"] = prof.version;
    doc["h"] = prof.h.m;
    json curve;
    curve["knots"] = prof.curve.knots;
    curve["values"] = prof.curve.values;
    curve["derivatives"] = prof.curve.derivatives;
    doc["curve"] = std::move(curve);
    doc["lambda"] = prof.lambda;
    doc["brightness_definition"] = prof.brightness_definition;
    if (!prof.provenance.empty()) {
        doc["provenance"] = prof.provenance;
    }
    return doc.dump(2) + "\n";
}

TransferProfile deserialize_profile(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("document: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("document: top level must be an object");
    }
    reject_unknown_fields(
        doc, {"version", "h", "curve", "lambda", "brightness_definition", "provenance"}, "");

    const json* jversion = find_field(doc, "version");
    if (!jversion) throw ParseError("version: missing field");
    if (!jversion->is_number_integer()) throw ParseError("version: expected an integer");
    const int version = jversion->get<int>();
    if (version != 1) {
        throw UnsupportedVersionError("version: unsupported profile version " +
                                      std::to_string(version));
    }

    TransferProfile prof;
    prof.version = version;

    const json* jh = find_field(doc, "h");
    if (!jh) throw ParseError("h: missing field");
    const std::vector<double> h_entries = require_number_array(*jh, "h");
    if (h_entries.size() != 9) {
        throw ParseError("h: expected 9 entries, got " + std::to_string(h_entries.size()));
    }
    std::copy(h_entries.begin(), h_entries.end(), prof.h.m.begin());
    if (!prof.h.full_rank()) {
        throw ParseError("h: matrix is singular");
    }

    const json* jcurve = find_field(doc, "curve");
    if (!jcurve) throw ParseError("curve: missing field");
    if (!jcurve->is_object()) throw ParseError("curve: expected an object");
    reject_unknown_fields(*jcurve, {"knots", "values", "derivatives"}, "curve.");
    const json* jknots = find_field(*jcurve, "knots");
    const json* jvalues = find_field(*jcurve, "values");
    const json* jderivs = find_field(*jcurve, "derivatives");
    if (!jknots) throw ParseError("curve.knots: missing field");
    if (!jvalues) throw ParseError("curve.values: missing field");
    if (!jderivs) throw ParseError("curve.derivatives: missing field");
    prof.curve.knots = require_number_array(*jknots, "curve.knots");
    prof.curve.values = require_number_array(*jvalues, "curve.values");
    prof.curve.derivatives = require_number_array(*jderivs, "curve.derivatives");
    if (prof.curve.knots.size() < 2) {
        throw ParseError("curve.knots: need at least 2 knots");
    }
    if (prof.curve.values.size() != prof.curve.knots.size()) {
        throw ParseError("curve.values: length differs from curve.knots");
    }
    if (prof.curve.derivatives.size() != prof.curve.knots.size()) {
        throw ParseError("curve.derivatives: length differs from curve.knots");
    }
    for (std::size_t i = 1; i < prof.curve.knots.size(); ++i) {
        if (!(prof.curve.knots[i] > prof.curve.knots[i - 1])) {
            throw ParseError("curve.knots: values must be strictly ascending");
        }
    }

    const json* jlambda = find_field(doc, "lambda");
    if (!jlambda) throw ParseError("lambda: missing field");
    prof.lambda = require_finite_number(*jlambda, "lambda");
    if (prof.lambda < 0.0) {
        throw ParseError("lambda: must be >= 0");
    }

    const json* jbright = find_field(doc, "brightness_definition");
    if (!jbright) throw ParseError("brightness_definition: missing field");
    if (!jbright->is_string()) throw ParseError("brightness_definition: expected a string");
    prof.brightness_definition = jbright->get<std::string>();
    if (prof.brightness_definition != "mean_rgb") {
        throw ParseError("brightness_definition: unsupported value '" +
                         prof.brightness_definition + "'");
    }

    if (const json* jprov = find_field(doc, "provenance")) {
        if (!jprov->is_string()) throw ParseError("provenance: expected a string");
        prof.provenance = jprov->get<std::string>();
    }
    return prof;
}

void write_profile(const TransferProfile& prof, const std::string& path) {
    const std::string text = serialize_profile(prof);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

TransferProfile read_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return deserialize_profile(buf.str());
}

} // namespace regrade
