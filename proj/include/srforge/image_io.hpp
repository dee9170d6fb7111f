#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/tensor.hpp"

namespace srforge {

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit PNG (gray, RGB or palette without transparency) as a [1,3,H,W]
/// tensor in [0, 1]. Gray images are replicated to three channels.
TensorF read_image(const std::filesystem::path& path);

/// Rounds to 8-bit and writes a PNG atomically. Writes a grayscale PNG when
/// the channels agree to within one level, RGB otherwise.
void write_image(const TensorF& img, const std::filesystem::path& path);

/// Sorted *.png files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

struct NamedImage {
    std::string name;
    TensorF image;
};

/// Reads every PNG in `dir`; unreadable files are logged and appended to
/// `skipped` when given.
std::vector<NamedImage> load_images(const std::filesystem::path& dir, std::vector<std::string>* skipped = nullptr);

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::span<const unsigned char> bytes);

std::vector<unsigned char> read_file(const std::filesystem::path& path);

}  // namespace srforge
