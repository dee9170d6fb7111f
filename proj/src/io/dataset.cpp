#include "srforge/dataset.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <stdexcept>

#include "srforge/image_io.hpp"
#include "srforge/parallel.hpp"
#include "srforge/resize.hpp"

namespace srforge {

namespace fs = std::filesystem;

std::vector<double> default_multiscale_scales() { return {1.0, 0.75, 0.5, 1.0 / 3.0, 0.25}; }

std::string scale_tag(double scale) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", scale);
    return buf;
}

DatasetManifest prepare_multiscale(const fs::path& src_dir, const fs::path& dst_dir, const std::vector<double>& scales,
                                   std::optional<int> threads) {
    if (scales.empty()) throw std::invalid_argument("prepare_multiscale: no scales given");
    for (double s : scales) {
        if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("prepare_multiscale: scale " + scale_tag(s) + " outside (0, 1]");
    }
    if (fs::exists(dst_dir) && fs::equivalent(src_dir, dst_dir)) {
        throw std::invalid_argument("prepare_multiscale: output directory must differ from the input directory");
    }
    const auto files = list_images(src_dir);
    fs::create_directories(dst_dir);

    struct Result {
        std::vector<ManifestEntry> entries;
        std::string error;
    };
    std::vector<Result> results(files.size());
    parallel_for(files.size(), resolve_threads(threads), [&](std::size_t i) {
        const fs::path& src = files[i];
        Result& r = results[i];
        TensorF img;
        try {
            img = read_image(src);
        } catch (const std::exception& e) {
            r.error = e.what();
            return;
        }
        const Shape s = img.shape();
        for (double scale : scales) {
            ManifestEntry e;
            e.source = src.filename().string();
            e.scale = scale;
            e.output = src.stem().string() + "_x" + scale_tag(scale) + ".png";
            e.height = scaled_dim(s.h, scale);
            e.width = scaled_dim(s.w, scale);
            const fs::path out = dst_dir / e.output;
            if (e.height == s.h && e.width == s.w) {
                atomic_write(out, read_file(src));
            } else {
                write_image(resize(img, e.height, e.width, ResizeMethod::lanczos), out);
            }
            r.entries.push_back(std::move(e));
        }
    });

    DatasetManifest manifest;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!results[i].error.empty()) {
            spdlog::warn("skipping {}", results[i].error);
            manifest.skipped.push_back(files[i].filename().string());
            continue;
        }
        for (auto& e : results[i].entries) manifest.entries.push_back(std::move(e));
    }
    if (manifest.entries.empty()) throw std::runtime_error("prepare_multiscale: no readable images in " + src_dir.string());

    nlohmann::ordered_json j;
    j["scales"] = scales;
    j["skipped"] = manifest.skipped;
    auto& list = j["images"] = nlohmann::ordered_json::array();
    for (const auto& e : manifest.entries) {
        list.push_back({{"source", e.source}, {"scale", e.scale}, {"output", e.output}, {"height", e.height}, {"width", e.width}});
    }
    const std::string text = j.dump(2) + "\n";
    atomic_write(dst_dir / "manifest.json", std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
    return manifest;
}

}  // namespace srforge
