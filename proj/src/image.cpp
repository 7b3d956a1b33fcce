// Copyright 2026 The genhub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "genhub/image.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "genhub/error.hpp"

namespace genhub::metrics {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
Image scaled(const Image& in, const std::vector<T>& src, float max_value) {
  Image out{in.width, in.height, in.channels, std::vector<float>(src.size())};
  auto& dst = std::get<std::vector<float>>(out.pixels);
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i]) / max_value;
  return out;
}

}  // namespace

PixelType Image::type() const {
  switch (pixels.index()) {
    case 0: return PixelType::kU8;
    case 1: return PixelType::kU16;
    default: return PixelType::kF32;
  }
}

double Image::at(int x, int y, int c) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * channels + c;
  return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, pixels);
}

NormalizationMode parse_normalization(std::string_view text) {
  if (text == "none") return NormalizationMode::kNone;
  if (text == "unit_range") return NormalizationMode::kUnitRange;
  throw Error(ErrorKind::kBadQuery, "unknown normalization '" + std::string(text) +
                                        "' (expected none or unit_range)");
}

std::string_view normalization_name(NormalizationMode mode) {
  return mode == NormalizationMode::kNone ? "none" : "unit_range";
}

Image normalize_image(const Image& image, NormalizationMode mode) {
  if (mode == NormalizationMode::kNone) return image;
  switch (image.type()) {
    case PixelType::kU8:
      return scaled(image, std::get<0>(image.pixels), 255.0f);
    case PixelType::kU16:
      return scaled(image, std::get<1>(image.pixels), 65535.0f);
    case PixelType::kF32:
      break;
  }
  throw Error(ErrorKind::kUnsupportedDtype,
              "unit_range normalization needs 8- or 16-bit integer pixels");
}

std::vector<Image> normalize_images(std::span<const Image> images, NormalizationMode mode) {
  std::vector<Image> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    if (img.type() != images.front().type()) {
      throw Error(ErrorKind::kUnsupportedDtype, "images mix pixel types");
    }
    out.push_back(normalize_image(img, mode));
  }
  return out;
}

Image load_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorKind::kUnsupportedDtype, path.string() + " is not a PNG file");
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::kInternal, "libpng allocation failed");
  }

  // Declared before setjmp so a libpng longjmp never skips a constructor.
  Image img;
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::kUnsupportedDtype, "corrupt PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * img.height);
  rows.resize(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = buffer.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (out_depth == 16) {
    std::vector<std::uint16_t> px(img.sample_count());
    std::memcpy(px.data(), buffer.data(), px.size() * 2);
    img.pixels = std::move(px);
  } else {
    img.pixels = std::vector<std::uint8_t>(buffer.begin(),
                                           buffer.begin() + img.sample_count());
  }
  return img;
}

void save_png(const fs::path& path, const Image& image) {
  if (image.type() == PixelType::kF32) {
    throw Error(ErrorKind::kUnsupportedDtype, "PNG output needs integer pixels");
  }
  int color = 0;
  switch (image.channels) {
    case 1: color = PNG_COLOR_TYPE_GRAY; break;
    case 2: color = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color = PNG_COLOR_TYPE_RGB; break;
    case 4: color = PNG_COLOR_TYPE_RGBA; break;
    default: throw Error(ErrorKind::kShapeMismatch, "unsupported channel count");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::kInternal, "libpng allocation failed");
  }
  const bool wide = image.type() == PixelType::kU16;
  const std::size_t row_bytes =
      static_cast<std::size_t>(image.width) * image.channels * (wide ? 2 : 1);
  std::vector<unsigned char> buffer(row_bytes * image.height);
  if (wide) {
    std::memcpy(buffer.data(), std::get<1>(image.pixels).data(), buffer.size());
  } else {
    std::memcpy(buffer.data(), std::get<0>(image.pixels).data(), buffer.size());
  }
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) rows[y] = buffer.data() + y * row_bytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::kIo, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, wide ? 16 : 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (wide) png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<std::pair<std::string, Image>> load_image_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& item : fs::directory_iterator(dir, ec)) {
    if (item.is_regular_file() && item.path().extension() == ".png") {
      files.push_back(item.path());
    }
  }
  if (ec) throw Error(ErrorKind::kIo, "cannot list " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, Image>> out;
  for (const auto& f : files) out.emplace_back(f.stem().string(), load_png(f));
  return out;
}

}  // namespace genhub::metrics
