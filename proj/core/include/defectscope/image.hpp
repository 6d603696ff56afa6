#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dscope {

// Interleaved 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height bytes

  const std::uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::uint8_t* px(int x, int y) {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

// Label raster: one class id per pixel, 0 = background, 1..255 = defect category.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> classes;

  std::uint8_t at(int x, int y) const {
    return classes[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return classes[static_cast<std::size_t>(y) * width + x];
  }
};

struct PngDims {
  int width = 0;
  int height = 0;
};

// Decodes any PNG to 8-bit RGB (palette expanded, alpha stripped, gray promoted).
RgbImage read_rgb_png(const std::filesystem::path& path);

// Decodes a label PNG. Grayscale values or palette indices are taken verbatim
// as class ids; 16-bit and multi-channel files are rejected.
MaskImage read_mask_png(const std::filesystem::path& path);

// Reads width/height from the IHDR chunk without decoding pixel data.
PngDims read_png_dims(const std::filesystem::path& path);

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
void write_mask_png(const std::filesystem::path& path, const MaskImage& mask);

}  // namespace dscope
