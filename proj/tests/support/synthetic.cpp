#include "support/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>

#include <unistd.h>

namespace dscope::testing {

namespace {
std::atomic<int> g_dir_counter{0};
}

TempDir::TempDir(const std::string& tag) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "dscope-%s-%d-%d", tag.c_str(), static_cast<int>(::getpid()),
                g_dir_counter.fetch_add(1));
  path_ = std::filesystem::temp_directory_path() / buf;
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void stamp_disc(MaskImage& mask, int cx, int cy, int radius, std::uint8_t cls) {
  for (int y = std::max(0, cy - radius); y <= std::min(mask.height - 1, cy + radius); ++y) {
    for (int x = std::max(0, cx - radius); x <= std::min(mask.width - 1, cx + radius); ++x) {
      const int dx = x - cx;
      const int dy = y - cy;
      if (dx * dx + dy * dy <= radius * radius) mask.at(x, y) = cls;
    }
  }
}

void stamp_rect(MaskImage& mask, int x0, int y0, int x1, int y1, std::uint8_t cls) {
  for (int y = std::max(0, y0); y <= std::min(mask.height - 1, y1); ++y) {
    for (int x = std::max(0, x0); x <= std::min(mask.width - 1, x1); ++x) {
      mask.at(x, y) = cls;
    }
  }
}

MaskImage random_mask(Rng& rng, int width, int height, int max_classes, int blobs) {
  MaskImage mask{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)};
  for (int b = 0; b < blobs; ++b) {
    const auto cls = static_cast<std::uint8_t>(1 + rng.below(max_classes));
    if (rng.below(2) == 0) {
      const int r = 2 + static_cast<int>(rng.below(std::min(width, height) / 4));
      stamp_disc(mask, rng.uniform_int(0, width - 1), rng.uniform_int(0, height - 1), r, cls);
    } else {
      const int x0 = rng.uniform_int(0, width - 2);
      const int y0 = rng.uniform_int(0, height - 2);
      stamp_rect(mask, x0, y0, x0 + rng.uniform_int(1, width / 3), y0 + rng.uniform_int(1, height / 3),
                 cls);
    }
  }
  return mask;
}

RgbImage random_image(Rng& rng, int width, int height) {
  RgbImage img{width, height,
               std::vector<std::uint8_t>(3 * static_cast<std::size_t>(width) * height)};
  for (auto& byte : img.data) byte = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

RgbImage flat_image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img{width, height,
               std::vector<std::uint8_t>(3 * static_cast<std::size_t>(width) * height)};
  for (std::size_t i = 0; i < img.data.size(); i += 3) {
    img.data[i] = r;
    img.data[i + 1] = g;
    img.data[i + 2] = b;
  }
  return img;
}

namespace {

enum class Outcome { correct, undetected, misclassified };

Outcome outcome_for(int counter, bool multi_class) {
  if (multi_class) {
    // 4 correct : 1 undetected : 1 misclassified per six defects.
    switch (counter % 6) {
      case 3: return Outcome::undetected;
      case 5: return Outcome::misclassified;
      default: return Outcome::correct;
    }
  }
  return counter % 3 == 2 ? Outcome::undetected : Outcome::correct;
}

}  // namespace

DatasetDirs write_synthetic_dataset(const std::filesystem::path& root, const DatasetSpec& spec) {
  DatasetDirs dirs{root / "images", root / "gt", root / "pred"};
  std::filesystem::create_directories(dirs.images);
  std::filesystem::create_directories(dirs.gt);
  std::filesystem::create_directories(dirs.pred);

  int counter = 0;
  for (int i = 0; i < spec.images; ++i) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(i));
    char stem[32];
    std::snprintf(stem, sizeof(stem), "img%04d", i);

    RgbImage image{spec.width, spec.height,
                   std::vector<std::uint8_t>(3 * static_cast<std::size_t>(spec.width) * spec.height)};
    for (int y = 0; y < spec.height; ++y) {
      const auto base = static_cast<std::uint8_t>(30 + (y * 60) / spec.height);
      for (int x = 0; x < spec.width; ++x) {
        std::uint8_t* px = image.px(x, y);
        px[0] = base;
        px[1] = static_cast<std::uint8_t>(base + 8);
        px[2] = static_cast<std::uint8_t>(base + 16);
      }
    }
    MaskImage gt{spec.width, spec.height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(spec.width) * spec.height, 0)};
    MaskImage pred = gt;
    bool pred_used = false;

    const bool omit_pred = spec.omit_pred_files && i % 7 == 5;
    const int defects = 1 + static_cast<int>(rng.below(3));
    std::vector<BBox> placed;
    for (int d = 0; d < defects; ++d) {
      int radius = 0;
      int cx = 0;
      int cy = 0;
      bool ok = false;
      for (int attempt = 0; attempt < 24 && !ok; ++attempt) {
        radius = 4 + static_cast<int>(rng.below(5));
        cx = radius + 3 + static_cast<int>(rng.below(std::max(1, spec.width - 2 * radius - 6)));
        cy = radius + 3 + static_cast<int>(rng.below(std::max(1, spec.height - 2 * radius - 6)));
        const BBox box{cx - radius - 5, cy - radius - 5, cx + radius + 5, cy + radius + 5};
        ok = std::none_of(placed.begin(), placed.end(), [&](const BBox& other) {
          return box.x_min <= other.x_max && other.x_min <= box.x_max &&
                 box.y_min <= other.y_max && other.y_min <= box.y_max;
        });
        if (ok) placed.push_back(box);
      }
      if (!ok) continue;

      const std::uint8_t cls =
          spec.multi_class ? static_cast<std::uint8_t>(1 + counter % 2) : std::uint8_t{1};
      stamp_disc(gt, cx, cy, radius, cls);
      // Defect pixels take a class-specific tint so color characteristics carry signal.
      for (int y = cy - radius; y <= cy + radius; ++y) {
        for (int x = cx - radius; x <= cx + radius; ++x) {
          if (gt.at(x, y) != cls) continue;
          std::uint8_t* px = image.px(x, y);
          if (cls == 1) {
            px[0] = static_cast<std::uint8_t>(170 + rng.below(30));
            px[1] = static_cast<std::uint8_t>(60 + rng.below(20));
            px[2] = 50;
          } else {
            px[0] = 50;
            px[1] = static_cast<std::uint8_t>(70 + rng.below(20));
            px[2] = static_cast<std::uint8_t>(170 + rng.below(30));
          }
        }
      }

      Outcome outcome = outcome_for(counter, spec.multi_class);
      if (omit_pred) outcome = Outcome::undetected;
      ++counter;
      if (outcome != Outcome::undetected) {
        std::uint8_t pred_cls = cls;
        if (outcome == Outcome::misclassified) pred_cls = cls == 1 ? 2 : 1;
        stamp_disc(pred, cx + (counter % 2), cy, radius, pred_cls);
        pred_used = true;
      }
    }

    write_rgb_png(dirs.images / (std::string(stem) + ".png"), image);
    write_mask_png(dirs.gt / (std::string(stem) + ".png"), gt);
    if (!omit_pred && (pred_used || i % 2 == 0)) {
      write_mask_png(dirs.pred / (std::string(stem) + ".png"), pred);
    }
  }
  return dirs;
}

namespace {

LabelledMatrix matrix_skeleton(int n) {
  LabelledMatrix out;
  out.matrix.feature_list.assign(feature_names().begin(), feature_names().end());
  out.matrix.id_list.reserve(n);
  out.matrix.image_stems.assign(n, "synthetic");
  out.matrix.rows.resize(n);
  out.target.resize(n);
  for (int i = 0; i < n; ++i) out.matrix.id_list.push_back("synthetic#" + std::to_string(i));
  return out;
}

}  // namespace

LabelledMatrix separable_area_ratio_matrix(int n, std::uint64_t seed) {
  LabelledMatrix out = matrix_skeleton(n);
  Rng rng(seed, 0xa5a5);
  for (int i = 0; i < n; ++i) {
    const bool positive = rng.unit() < 0.2;
    out.target[i] = positive ? 1 : 0;
    out.matrix.rows[i][0] = positive ? rng.uniform(0.001, 0.005) : rng.uniform(0.02, 0.9);
    for (std::size_t f = 1; f < kFeatureCount; ++f) out.matrix.rows[i][f] = rng.unit();
  }
  return out;
}

LabelledMatrix redundant_separable_matrix(int n, std::uint64_t seed) {
  LabelledMatrix out = matrix_skeleton(n);
  Rng rng(seed, 0x5a5a);
  for (int i = 0; i < n; ++i) {
    const bool positive = rng.unit() < 0.2;
    out.target[i] = positive ? 1 : 0;
    const double latent = positive ? rng.uniform(0.001, 0.005) : rng.uniform(0.02, 0.9);
    out.matrix.rows[i][0] = latent;
    for (std::size_t f = 1; f < kFeatureCount; ++f) {
      out.matrix.rows[i][f] = 0.001 * static_cast<double>(f) + latent / (1.0 + 0.1 * f);
    }
  }
  return out;
}

LabelledMatrix informative_matrix(int n, std::size_t informative, std::uint64_t seed) {
  LabelledMatrix out = matrix_skeleton(n);
  Rng rng(seed, 0x1f1f);
  for (int i = 0; i < n; ++i) {
    const bool positive = rng.unit() < 0.3;
    out.target[i] = positive ? 1 : 0;
    for (std::size_t f = 0; f < kFeatureCount; ++f) out.matrix.rows[i][f] = rng.unit();
    out.matrix.rows[i][informative] =
        positive ? rng.uniform(0.75, 1.0) : rng.uniform(0.0, 0.65);
  }
  return out;
}

}  // namespace dscope::testing
