#pragma once

#include <array>

#include "srforge/tensor.hpp"

namespace srforge {

/// Baseline JPEG quantization tables (ITU-T T.81 Annex K) scaled to
/// `quality` with the IJG mapping, natural (row-major) order.
std::array<int, 64> jpeg_luma_table(int quality);
std::array<int, 64> jpeg_chroma_table(int quality);

/// Pixel-domain effect of a JPEG encode/decode at `quality` in [1, 100]:
/// 8-bit quantization, full-range YCbCr (3 channels), 8x8 DCT,
/// quantize/dequantize, inverse DCT, 8-bit output. No chroma subsampling
/// and no entropy coding. Images are reflect-padded to multiples of 8.
TensorF jpeg_roundtrip(const TensorF& img, int quality);

}  // namespace srforge
