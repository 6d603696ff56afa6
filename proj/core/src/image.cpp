#include "defectscope/image.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>

#include "defectscope/errors.hpp"

namespace dscope {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr fp(std::fopen(path.string().c_str(), mode));
  if (!fp) raise(Errc::unreadable_file, "cannot open " + path.string());
  return fp;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  bool ok() const { return png && info; }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  bool ok() const { return png && info; }
};

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  FilePtr fp = open_file(path, "rb");
  PngReader r;
  if (!r.ok()) raise(Errc::unreadable_file, "libpng init failed for " + path.string());

  RgbImage out;
  std::vector<png_bytep> rows;

  // Locals touched after this point are constructed before setjmp; a longjmp
  // lands here and we leave through a normal throw, so destructors still run.
  if (setjmp(png_jmpbuf(r.png))) {
    raise(Errc::unreadable_file, "corrupt PNG: " + path.string());
  }

  png_init_io(r.png, fp.get());
  png_read_info(r.png, r.info);

  png_set_strip_16(r.png);
  png_set_packing(r.png);
  const png_byte color_type = png_get_color_type(r.png, r.info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(r.png, r.info) < 8) {
    png_set_expand_gray_1_2_4_to_8(r.png);
  }
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(r.png);
  }
  png_set_strip_alpha(r.png);
  png_set_interlace_handling(r.png);
  png_read_update_info(r.png, r.info);

  out.width = static_cast<int>(png_get_image_width(r.png, r.info));
  out.height = static_cast<int>(png_get_image_height(r.png, r.info));
  const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
  if (rowbytes != static_cast<std::size_t>(out.width) * 3) {
    raise(Errc::unreadable_file, "unexpected row layout in " + path.string());
  }
  out.data.resize(rowbytes * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + rowbytes * y;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  return out;
}

MaskImage read_mask_png(const std::filesystem::path& path) {
  FilePtr fp = open_file(path, "rb");
  PngReader r;
  if (!r.ok()) raise(Errc::unreadable_file, "libpng init failed for " + path.string());

  MaskImage out;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(r.png))) {
    raise(Errc::unreadable_file, "corrupt PNG: " + path.string());
  }

  png_init_io(r.png, fp.get());
  png_read_info(r.png, r.info);

  const png_byte color_type = png_get_color_type(r.png, r.info);
  const png_byte bit_depth = png_get_bit_depth(r.png, r.info);
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_PALETTE) {
    raise(Errc::unreadable_file, "mask must be single-channel (gray or palette): " + path.string());
  }
  if (bit_depth > 8) {
    raise(Errc::unreadable_file, "mask must be 8-bit: " + path.string());
  }
  // Sub-byte rasters unpack to one byte per pixel with values kept verbatim,
  // so palette indices and small gray class ids survive untouched.
  png_set_packing(r.png);
  png_set_interlace_handling(r.png);
  png_read_update_info(r.png, r.info);

  out.width = static_cast<int>(png_get_image_width(r.png, r.info));
  out.height = static_cast<int>(png_get_image_height(r.png, r.info));
  const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
  if (rowbytes != static_cast<std::size_t>(out.width)) {
    raise(Errc::unreadable_file, "unexpected mask row layout in " + path.string());
  }
  out.classes.resize(rowbytes * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.classes.data() + rowbytes * y;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  return out;
}

PngDims read_png_dims(const std::filesystem::path& path) {
  static const unsigned char signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  FilePtr fp = open_file(path, "rb");
  unsigned char header[24];
  if (std::fread(header, 1, sizeof(header), fp.get()) != sizeof(header) ||
      std::memcmp(header, signature, 8) != 0 || std::memcmp(header + 12, "IHDR", 4) != 0) {
    raise(Errc::unreadable_file, "not a PNG file: " + path.string());
  }
  auto be32 = [&](int off) {
    return (static_cast<std::uint32_t>(header[off]) << 24) |
           (static_cast<std::uint32_t>(header[off + 1]) << 16) |
           (static_cast<std::uint32_t>(header[off + 2]) << 8) |
           static_cast<std::uint32_t>(header[off + 3]);
  };
  return PngDims{static_cast<int>(be32(16)), static_cast<int>(be32(20))};
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) raise(Errc::io_failure, "cannot create " + path.string());
  PngWriter w;
  if (!w.ok()) raise(Errc::io_failure, "libpng init failed for " + path.string());

  std::vector<png_bytep> rows(image.height);

  if (setjmp(png_jmpbuf(w.png))) {
    raise(Errc::io_failure, "PNG write failed: " + path.string());
  }

  png_init_io(w.png, fp.get());
  png_set_IHDR(w.png, w.info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(image.data.data() + 3 * static_cast<std::size_t>(y) * image.width);
  }
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

void write_mask_png(const std::filesystem::path& path, const MaskImage& mask) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) raise(Errc::io_failure, "cannot create " + path.string());
  PngWriter w;
  if (!w.ok()) raise(Errc::io_failure, "libpng init failed for " + path.string());

  std::vector<png_bytep> rows(mask.height);

  if (setjmp(png_jmpbuf(w.png))) {
    raise(Errc::io_failure, "PNG write failed: " + path.string());
  }

  png_init_io(w.png, fp.get());
  png_set_IHDR(w.png, w.info, mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  for (int y = 0; y < mask.height; ++y) {
    rows[y] = const_cast<png_bytep>(mask.classes.data() + static_cast<std::size_t>(y) * mask.width);
  }
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

}  // namespace dscope
