// regrade command-line tool: extract color transfer profiles, apply them to
// images or frame directories, run one-shot approximations, and report PSNR.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "regrade/errors.hpp"
#include "regrade/image_io.hpp"
#include "regrade/metrics.hpp"
#include "regrade/profile.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitUsage = 64;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string format_db(double db) {
    if (std::isinf(db)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", db);
    return buf;
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".ppm" || ext == ".png";
}

// The tool's estimation defaults are tighter than the library's: a brightness
// change in the pair slows the alternation enough that the loose tolerance can
// report convergence on a still-poor fit, and profile extraction is a
// once-per-shot cost where a second of fitting is well spent.
struct ExtractArgs {
    std::string source, target, out;
    int downsample = -1; // auto
    double lambda = 0.1;
    int slots = 50;
    double epsilon = 1e-9;
    int max_iters = 5000;
};

int cmd_extract(const ExtractArgs& args) {
    const regrade::ImageRGB src = regrade::load_image(args.source);
    const regrade::ImageRGB tgt = regrade::load_image(args.target);

    regrade::ExtractOptions opts;
    opts.k_downsample = args.downsample;
    opts.lambda = args.lambda;
    opts.n_slots = args.slots;
    opts.als.epsilon_per_row = args.epsilon;
    opts.als.max_iterations = args.max_iters;
    opts.provenance = "source=" + args.source + " target=" + args.target;

    regrade::AlsResult als;
    const regrade::TransferProfile prof = regrade::extract_profile(src, tgt, opts, &als);
    regrade::write_profile(prof, args.out);

    if (!als.converged) {
        std::cerr << "warning: ALS stopped at max iterations (" << als.iterations
                  << ") without meeting the tolerance; profile is still usable\n";
    }

    const regrade::ImageRGB replayed =
        regrade::apply_profile(src, prof, regrade::ApplyMode::Shading);
    std::cout << "iterations=" << als.iterations << "\n";
    std::cout << "final_residual=" << als.final_residual << "\n";
    std::cout << "self_psnr=" << format_db(regrade::psnr(replayed, tgt)) << "\n";
    return kExitOk;
}

struct ApplyArgs {
    std::string profile, input, out;
    std::string mode = "shading";
    int jobs = 0; // 0 = hardware concurrency
};

struct FrameJob {
    fs::path in;
    fs::path out;
    double ms = 0.0;
    std::string error;
};

int cmd_apply(const ApplyArgs& args) {
    const regrade::TransferProfile prof = regrade::read_profile(args.profile);
    const regrade::ApplyMode mode =
        (args.mode == "simple") ? regrade::ApplyMode::Simple : regrade::ApplyMode::Shading;

    std::vector<FrameJob> jobs;
    const bool dir_mode = fs::is_directory(args.input);
    if (dir_mode) {
        for (const auto& entry : fs::directory_iterator(args.input)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) {
                FrameJob job;
                job.in = entry.path();
                job.out = fs::path(args.out) / entry.path().filename();
                jobs.push_back(std::move(job));
            }
        }
        if (jobs.empty()) {
            throw regrade::DegenerateInputError("no image files (*.ppm, *.png) in " +
                                                args.input);
        }
        std::sort(jobs.begin(), jobs.end(),
                  [](const FrameJob& a, const FrameJob& b) { return a.in < b.in; });
        fs::create_directories(args.out);
    } else {
        FrameJob job;
        job.in = args.input;
        job.out = args.out;
        jobs.push_back(std::move(job));
    }

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        std::min<unsigned>(args.jobs > 0 ? static_cast<unsigned>(args.jobs) : hw,
                           static_cast<unsigned>(jobs.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            FrameJob& job = jobs[i];
            const auto t0 = Clock::now();
            try {
                const regrade::ImageRGB frame = regrade::load_image(job.in.string());
                regrade::save_image(regrade::apply_profile(frame, prof, mode),
                                    job.out.string());
            } catch (const std::exception& e) {
                job.error = e.what();
            }
            job.ms = elapsed_ms(t0);
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Report in lexicographic frame order regardless of scheduling.
    bool failed = false;
    double total_ms = 0.0;
    for (const FrameJob& job : jobs) {
        if (!job.error.empty()) {
            std::cerr << "error: " << job.in.string() << ": " << job.error << "\n";
            failed = true;
            continue;
        }
        total_ms += job.ms;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", job.ms);
        std::cout << "frame=" << job.in.filename().string() << " ms=" << buf << "\n";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", total_ms);
    std::cout << "frames=" << jobs.size() << " total_ms=" << buf << "\n";
    return failed ? kExitIo : kExitOk;
}

struct ApproxArgs {
    std::string source, target, out;
    std::string variant;
    int downsample = -1;
    double lambda = 0.1;
    int slots = 50;
    double epsilon = 1e-9;
    int max_iters = 5000;
};

int cmd_approx(const ApproxArgs& args) {
    const regrade::ImageRGB src = regrade::load_image(args.source);
    const regrade::ImageRGB tgt = regrade::load_image(args.target);

    regrade::TransferVariant variant = regrade::TransferVariant::ShadingExact;
    if (args.variant == "simple") variant = regrade::TransferVariant::Simple;
    else if (args.variant == "mapped") variant = regrade::TransferVariant::ShadingMapped;

    regrade::ExtractOptions opts;
    opts.k_downsample = args.downsample;
    opts.lambda = args.lambda;
    opts.n_slots = args.slots;
    opts.als.epsilon_per_row = args.epsilon;
    opts.als.max_iterations = args.max_iters;

    const regrade::ImageRGB approx = regrade::approximate_transfer(src, tgt, variant, opts);
    regrade::save_image(approx, args.out);
    std::cout << "psnr=" << format_db(regrade::psnr(approx, tgt)) << "\n";
    return kExitOk;
}

int cmd_psnr(const std::string& a_path, const std::string& b_path) {
    const regrade::ImageRGB a = regrade::load_image(a_path);
    const regrade::ImageRGB b = regrade::load_image(b_path);
    std::cout << "psnr=" << format_db(regrade::psnr(a, b)) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regrade: decompose a color transfer into a chromaticity homography and a "
                 "shading curve, then re-apply it to new images or frames"};
    app.require_subcommand(1);

    ExtractArgs ext;
    CLI::App* extract = app.add_subcommand(
        "extract", "Learn a transfer profile from a source/target image pair");
    extract->add_option("--source", ext.source, "Source image (apply input)")->required();
    extract->add_option("--target", ext.target, "Color-transferred rendition of the source")
        ->required();
    extract->add_option("--out", ext.out, "Profile file to write")->required();
    extract->add_option("--downsample", ext.downsample,
                        "Halvings before homography estimation; -1 auto-selects the "
                        "smallest k with max dimension <= 256");
    extract->add_option("--lambda", ext.lambda, "Shading smoothness weight stored in the profile");
    extract->add_option("--slots", ext.slots, "Brightness bins for the shading curve");
    extract->add_option("--epsilon", ext.epsilon, "ALS convergence tolerance per valid pixel");
    extract->add_option("--max-iters", ext.max_iters, "ALS iteration cap");

    ApplyArgs app_args;
    CLI::App* apply = app.add_subcommand(
        "apply", "Apply a profile to an image or to every frame in a directory");
    apply->add_option("--profile", app_args.profile, "Profile file")->required();
    apply->add_option("--input", app_args.input, "Input image or frame directory")->required();
    apply->add_option("--out", app_args.out, "Output image or directory")->required();
    apply->add_option("--mode", app_args.mode, "simple | shading (default shading)")
        ->check(CLI::IsMember({"simple", "shading"}));
    apply->add_option("--jobs", app_args.jobs,
                      "Worker threads for directory mode; 0 = all hardware threads");

    ApproxArgs apx;
    CLI::App* approx = app.add_subcommand(
        "approx", "One-shot approximation of a transfer pair, reporting PSNR");
    approx->add_option("--source", apx.source, "Source image")->required();
    approx->add_option("--target", apx.target, "Transfer result to approximate")->required();
    approx->add_option("--out", apx.out, "Approximation image to write")->required();
    approx->add_option("--variant", apx.variant, "simple | shading | mapped")
        ->required()
        ->check(CLI::IsMember({"simple", "shading", "mapped"}));
    approx->add_option("--downsample", apx.downsample,
                       "Halvings before homography estimation; -1 = auto");
    approx->add_option("--lambda", apx.lambda, "Shading smoothness weight (mapped variant)");
    approx->add_option("--slots", apx.slots, "Brightness bins (mapped variant)");
    approx->add_option("--epsilon", apx.epsilon, "Estimation tolerance per valid pixel");
    approx->add_option("--max-iters", apx.max_iters, "Estimation iteration cap");

    std::string psnr_a, psnr_b;
    CLI::App* psnr_cmd = app.add_subcommand("psnr", "PSNR between two images, in dB");
    psnr_cmd->add_option("a", psnr_a, "First image")->required();
    psnr_cmd->add_option("b", psnr_b, "Second image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (extract->parsed()) return cmd_extract(ext);
        if (apply->parsed()) return cmd_apply(app_args);
        if (approx->parsed()) return cmd_approx(apx);
        if (psnr_cmd->parsed()) return cmd_psnr(psnr_a, psnr_b);
    } catch (const regrade::DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const regrade::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const regrade::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
