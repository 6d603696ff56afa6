#pragma once

#include <cstdint>
#include <vector>

#include "defectscope/features.hpp"
#include "defectscope/image.hpp"
#include "defectscope/rng.hpp"

namespace dscope::bench {

inline MaskImage blob_mask(int size, int blobs, std::uint64_t seed) {
  MaskImage mask{size, size, std::vector<std::uint8_t>(static_cast<std::size_t>(size) * size, 0)};
  Rng rng(seed);
  for (int b = 0; b < blobs; ++b) {
    const int r = 3 + static_cast<int>(rng.below(size / 8));
    const int cx = rng.uniform_int(r, size - 1 - r);
    const int cy = rng.uniform_int(r, size - 1 - r);
    const auto cls = static_cast<std::uint8_t>(1 + rng.below(2));
    for (int y = cy - r; y <= cy + r; ++y) {
      for (int x = cx - r; x <= cx + r; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) mask.at(x, y) = cls;
      }
    }
  }
  return mask;
}

inline RgbImage noise_image(int size, std::uint64_t seed) {
  RgbImage img{size, size, std::vector<std::uint8_t>(3 * static_cast<std::size_t>(size) * size)};
  Rng rng(seed);
  for (auto& byte : img.data) byte = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

inline DCMatrix noise_matrix(int n, std::uint64_t seed) {
  DCMatrix m;
  m.feature_list.assign(feature_names().begin(), feature_names().end());
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    m.id_list.push_back("b#" + std::to_string(i));
    m.image_stems.push_back("b");
    DCVector row{};
    for (auto& v : row) v = rng.unit();
    m.rows.push_back(row);
  }
  return m;
}

}  // namespace dscope::bench
