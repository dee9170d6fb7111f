#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace srforge {

/// {1, 0.75, 0.5, 1/3, 0.25}
std::vector<double> default_multiscale_scales();

/// Short label used in output names: 1, 0.75, 0.5, 0.333, 0.25.
std::string scale_tag(double scale);

struct ManifestEntry {
    std::string source;
    double scale = 1.0;
    std::string output;
    int height = 0;
    int width = 0;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> skipped;
};

/// Writes `<stem>_x<tag>.png` for every readable PNG in `src_dir` and every
/// scale, plus `manifest.json`. Scale 1 is a byte copy of the source file;
/// other scales are Lanczos resized to scaled_dim(H, s) x scaled_dim(W, s).
/// Throws when nothing was written or a scale lies outside (0, 1].
DatasetManifest prepare_multiscale(const std::filesystem::path& src_dir, const std::filesystem::path& dst_dir,
                                   const std::vector<double>& scales = default_multiscale_scales(),
                                   std::optional<int> threads = std::nullopt);

}  // namespace srforge
