#include "srforge/image_io.hpp"

#include <png.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unistd.h>

namespace srforge {

namespace fs = std::filesystem;

namespace {

struct ReadBuffer {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t count) {
    auto* buf = static_cast<ReadBuffer*>(png_get_io_ptr(png));
    if (buf->pos + count > buf->size) png_error(png, "unexpected end of file");
    std::memcpy(out, buf->data + buf->pos, count);
    buf->pos += count;
}

void write_callback(png_structp png, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void flush_callback(png_structp) {}

void error_callback(png_structp png, png_const_charp message) {
    auto* msg = static_cast<std::string*>(png_get_error_ptr(png));
    if (msg != nullptr) *msg = message;
    png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

}  // namespace

std::vector<unsigned char> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void atomic_write(const fs::path& path, std::span<const unsigned char> bytes) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

TensorF read_image(const fs::path& path) {
    const std::vector<unsigned char> bytes = read_file(path);
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw ImageError(path.string() + ": not a PNG file");
    }
    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, error_callback, warning_callback);
    png_infop info = png_create_info_struct(png);
    ReadBuffer buf{bytes.data(), bytes.size()};
    std::vector<png_bytep> rows;
    std::vector<unsigned char> pixels;
    int width = 0, height = 0, channels = 0;
    std::string reject;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError(path.string() + ": " + (message.empty() ? "decode failed" : message));
    }
    png_set_read_fn(png, &buf, read_callback);
    png_read_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth != 8 && !(color == PNG_COLOR_TYPE_PALETTE && depth < 8) && !(color == PNG_COLOR_TYPE_GRAY && depth < 8)) {
        reject = "unsupported bit depth " + std::to_string(depth) + " (8-bit PNG required)";
    } else if ((color & PNG_COLOR_MASK_ALPHA) != 0 || png_get_valid(png, info, PNG_INFO_tRNS) != 0) {
        reject = "alpha channels are not supported";
    }
    if (!reject.empty()) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError(path.string() + ": " + reject);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    channels = png_get_channels(png, info);
    pixels.resize(static_cast<std::size_t>(width) * height * channels);
    rows.resize(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = pixels.data() + static_cast<std::size_t>(y) * width * channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    TensorF img({1, 3, height, width});
    const std::size_t plane = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < plane; ++i) {
        for (int c = 0; c < 3; ++c) {
            const unsigned char v = pixels[i * channels + (channels == 1 ? 0 : c)];
            img[static_cast<std::size_t>(c) * plane + i] = static_cast<float>(v) / 255.0f;
        }
    }
    return img;
}

void write_image(const TensorF& img, const fs::path& path) {
    const Shape s = img.shape();
    if (s.n != 1 || (s.c != 1 && s.c != 3)) {
        throw ImageError(path.string() + ": can only write one 1- or 3-channel image, got " + s.str());
    }
    const std::size_t plane = s.plane();
    auto level = [](float v) {
        return static_cast<unsigned char>(std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0));
    };
    std::vector<unsigned char> rgb(plane * 3);
    for (std::size_t i = 0; i < plane; ++i) {
        for (int c = 0; c < 3; ++c) rgb[i * 3 + c] = level(img[static_cast<std::size_t>(s.c == 1 ? 0 : c) * plane + i]);
    }
    bool gray = true;
    for (std::size_t i = 0; i < plane && gray; ++i) {
        gray = std::abs(rgb[i * 3] - rgb[i * 3 + 1]) <= 1 && std::abs(rgb[i * 3] - rgb[i * 3 + 2]) <= 1;
    }
    const int channels = gray ? 1 : 3;
    std::vector<unsigned char> pixels(plane * channels);
    for (std::size_t i = 0; i < plane; ++i) {
        if (gray) {
            pixels[i] = level(s.c == 1 ? img[i] : static_cast<float>((img[i] + img[plane + i] + img[2 * plane + i]) / 3.0));
        } else {
            std::copy_n(&rgb[i * 3], 3, &pixels[i * 3]);
        }
    }

    std::vector<unsigned char> encoded;
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, error_callback, warning_callback);
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep> rows(static_cast<std::size_t>(s.h));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ImageError(path.string() + ": encode failed: " + message);
    }
    png_set_write_fn(png, &encoded, write_callback, flush_callback);
    png_set_IHDR(png, info, static_cast<png_uint_32>(s.w), static_cast<png_uint_32>(s.h), 8,
                 gray ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < s.h; ++y) {
        rows[static_cast<std::size_t>(y)] = pixels.data() + static_cast<std::size_t>(y) * s.w * channels;
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    atomic_write(path, encoded);
}

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ImageError(dir.string() + ": not a directory");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NamedImage> load_images(const fs::path& dir, std::vector<std::string>* skipped) {
    std::vector<NamedImage> out;
    for (const auto& path : list_images(dir)) {
        try {
            out.push_back({path.filename().string(), read_image(path)});
        } catch (const ImageError& e) {
            spdlog::warn("skipping {}", e.what());
            if (skipped != nullptr) skipped->push_back(path.filename().string());
        }
    }
    return out;
}

}  // namespace srforge
