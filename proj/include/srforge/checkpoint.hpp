#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/networks.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
    std::int64_t iteration = 0;
    std::optional<GeneratorConfig> generator;
    std::optional<DiscriminatorConfig> discriminator;
    /// Free-form string annotations (seed, config echoes, optimizer steps).
    std::map<std::string, std::string> notes;
    friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

/// Named float tensors plus metadata. Tensors are kept sorted by name, which
/// makes the on-disk form canonical.
///
/// File layout (little-endian): "SRFG", u32 version, u64 manifest length,
/// UTF-8 JSON manifest, then the concatenated f32 payload. The manifest
/// lists each tensor's name, dtype ("f32"), shape, offset and byte length
/// relative to the payload start, plus the metadata object.
struct Checkpoint {
    CheckpointMeta meta;
    std::map<std::string, TensorF> tensors;

    [[nodiscard]] bool has_prefix(const std::string& prefix) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Manifest as stored in the file, pretty-printed.
std::string checkpoint_manifest_text(const std::filesystem::path& path);

/// Copies parameters and buffers into `ckpt`, names prefixed by `prefix`.
void export_model(const Model<float>& model, Checkpoint& ckpt, const std::string& prefix = "");

/// Loads every parameter and buffer of `model` from `ckpt`. Missing tensors
/// and shape conflicts are collected and reported together in one
/// CheckpointError. Names read are added to `claimed` when given.
void import_model(Model<float>& model, const Checkpoint& ckpt, const std::string& prefix = "",
                  std::set<std::string>* claimed = nullptr);

}  // namespace srforge
