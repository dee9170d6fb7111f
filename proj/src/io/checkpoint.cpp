#include "srforge/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "srforge/image_io.hpp"

namespace srforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'R', 'F', 'G'};

template <typename U>
void put_le(std::vector<unsigned char>& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

template <typename U>
U get_le(const unsigned char* p) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
    return v;
}

json generator_json(const GeneratorConfig& g) {
    return {{"in_channels", g.in_channels},         {"out_channels", g.out_channels},
            {"num_features", g.num_features},       {"num_rrdb_blocks", g.num_rrdb_blocks},
            {"growth_channels", g.growth_channels}, {"scale", g.scale},
            {"residual_beta", g.residual_beta}};
}

json discriminator_json(const DiscriminatorConfig& d) {
    return {{"in_channels", d.in_channels},
            {"num_features", d.num_features},
            {"spectral_norm_iterations", d.spectral_norm_iterations}};
}

json manifest_json(const Checkpoint& ckpt) {
    json meta{{"iteration", ckpt.meta.iteration}, {"notes", ckpt.meta.notes}};
    if (ckpt.meta.generator) meta["generator"] = generator_json(*ckpt.meta.generator);
    if (ckpt.meta.discriminator) meta["discriminator"] = discriminator_json(*ckpt.meta.discriminator);
    json tensors = json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, t] : ckpt.tensors) {
        const std::uint64_t length = t.numel() * sizeof(float);
        const Shape s = t.shape();
        tensors.push_back({{"name", name},
                           {"dtype", "f32"},
                           {"shape", {s.n, s.c, s.h, s.w}},
                           {"offset", offset},
                           {"length", length}});
        offset += length;
    }
    return {{"format_version", kCheckpointVersion}, {"metadata", meta}, {"tensors", tensors}};
}

struct RawFile {
    json manifest;
    std::vector<unsigned char> bytes;
    std::size_t payload_start = 0;
};

RawFile read_raw(const fs::path& path) {
    RawFile raw;
    try {
        raw.bytes = read_file(path);
    } catch (const std::exception& e) {
        throw CheckpointError(e.what());
    }
    const auto& b = raw.bytes;
    const std::string where = path.string() + ": ";
    if (b.size() < 16 || std::memcmp(b.data(), kMagic, 4) != 0) throw CheckpointError(where + "not a checkpoint file");
    const auto version = get_le<std::uint32_t>(b.data() + 4);
    if (version != kCheckpointVersion) {
        throw CheckpointError(where + "unsupported format version " + std::to_string(version) + " (expected " +
                              std::to_string(kCheckpointVersion) + ")");
    }
    const auto mlen = get_le<std::uint64_t>(b.data() + 8);
    if (mlen > b.size() - 16) throw CheckpointError(where + "manifest length exceeds file size");
    try {
        raw.manifest = json::parse(b.begin() + 16, b.begin() + 16 + static_cast<std::ptrdiff_t>(mlen));
    } catch (const json::exception& e) {
        throw CheckpointError(where + "corrupt manifest: " + e.what());
    }
    raw.payload_start = 16 + static_cast<std::size_t>(mlen);
    return raw;
}

GeneratorConfig generator_from(const json& j) {
    GeneratorConfig g;
    g.in_channels = j.at("in_channels");
    g.out_channels = j.at("out_channels");
    g.num_features = j.at("num_features");
    g.num_rrdb_blocks = j.at("num_rrdb_blocks");
    g.growth_channels = j.at("growth_channels");
    g.scale = j.at("scale");
    g.residual_beta = j.at("residual_beta");
    return g;
}

DiscriminatorConfig discriminator_from(const json& j) {
    DiscriminatorConfig d;
    d.in_channels = j.at("in_channels");
    d.num_features = j.at("num_features");
    d.spectral_norm_iterations = j.at("spectral_norm_iterations");
    return d;
}

}  // namespace

bool Checkpoint::has_prefix(const std::string& prefix) const {
    auto it = tensors.lower_bound(prefix);
    return it != tensors.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
    const std::string manifest = manifest_json(ckpt).dump();
    std::vector<unsigned char> out;
    std::size_t payload = 0;
    for (const auto& [name, t] : ckpt.tensors) payload += t.numel() * sizeof(float);
    out.reserve(16 + manifest.size() + payload);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_le<std::uint32_t>(out, kCheckpointVersion);
    put_le<std::uint64_t>(out, manifest.size());
    out.insert(out.end(), manifest.begin(), manifest.end());
    for (const auto& [name, t] : ckpt.tensors) {
        for (float v : t.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    }
    atomic_write(path, out);
}

Checkpoint load_checkpoint(const fs::path& path) {
    RawFile raw = read_raw(path);
    const std::string where = path.string() + ": ";
    Checkpoint ckpt;
    try {
        const json& meta = raw.manifest.at("metadata");
        ckpt.meta.iteration = meta.at("iteration");
        ckpt.meta.notes = meta.at("notes").get<std::map<std::string, std::string>>();
        if (meta.contains("generator")) ckpt.meta.generator = generator_from(meta["generator"]);
        if (meta.contains("discriminator")) ckpt.meta.discriminator = discriminator_from(meta["discriminator"]);

        const std::size_t payload_size = raw.bytes.size() - raw.payload_start;
        std::uint64_t expected_offset = 0;
        for (const json& entry : raw.manifest.at("tensors")) {
            const std::string name = entry.at("name");
            if (entry.at("dtype") != "f32") throw CheckpointError(where + name + ": unsupported dtype");
            const auto dims = entry.at("shape").get<std::vector<int>>();
            if (dims.size() != 4) throw CheckpointError(where + name + ": shape must have 4 dimensions");
            const Shape shape{dims[0], dims[1], dims[2], dims[3]};
            if (!shape.valid()) throw CheckpointError(where + name + ": invalid shape " + shape.str());
            const std::uint64_t offset = entry.at("offset");
            const std::uint64_t length = entry.at("length");
            if (offset != expected_offset) throw CheckpointError(where + name + ": tensor offsets overlap or leave gaps");
            if (length != shape.numel() * sizeof(float)) {
                throw CheckpointError(where + name + ": byte length does not match shape " + shape.str());
            }
            if (offset + length > payload_size) throw CheckpointError(where + name + ": payload is truncated");
            TensorF t(shape);
            const unsigned char* src = raw.bytes.data() + raw.payload_start + offset;
            for (std::size_t i = 0; i < t.numel(); ++i) {
                t[i] = std::bit_cast<float>(get_le<std::uint32_t>(src + 4 * i));
            }
            if (!ckpt.tensors.emplace(name, std::move(t)).second) {
                throw CheckpointError(where + "duplicate tensor " + name);
            }
            expected_offset = offset + length;
        }
        if (expected_offset != payload_size) {
            throw CheckpointError(where + "payload holds " + std::to_string(payload_size) + " bytes but the manifest declares " +
                                  std::to_string(expected_offset));
        }
    } catch (const json::exception& e) {
        throw CheckpointError(where + "corrupt manifest: " + e.what());
    }
    return ckpt;
}

std::string checkpoint_manifest_text(const fs::path& path) { return read_raw(path).manifest.dump(2); }

void export_model(const Model<float>& model, Checkpoint& ckpt, const std::string& prefix) {
    for (const auto& p : model.parameters()) ckpt.tensors.insert_or_assign(prefix + p.name, p.value);
    for (const auto& b : model.buffers()) ckpt.tensors.insert_or_assign(prefix + b.name, b.value);
}

void import_model(Model<float>& model, const Checkpoint& ckpt, const std::string& prefix, std::set<std::string>* claimed) {
    std::vector<std::string> problems;
    auto take = [&](const std::string& name, TensorF& dst) {
        const std::string key = prefix + name;
        auto it = ckpt.tensors.find(key);
        if (it == ckpt.tensors.end()) {
            problems.push_back("missing " + key);
            return;
        }
        if (!(it->second.shape() == dst.shape())) {
            problems.push_back(key + " has shape " + it->second.shape().str() + ", model expects " + dst.shape().str());
            return;
        }
        dst = it->second;
        if (claimed != nullptr) claimed->insert(key);
    };
    for (auto& p : model.parameters()) take(p.name, p.value);
    for (auto& b : model.buffers()) take(b.name, b.value);
    if (!problems.empty()) {
        std::string msg = "checkpoint does not match the model:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw CheckpointError(msg);
    }
}

}  // namespace srforge
