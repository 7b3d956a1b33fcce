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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace genhub::metrics {

enum class PixelType { kU8, kU16, kF32 };

// Interleaved row-major (height, width, channels) pixel buffer.
struct Image {
  using Pixels = std::variant<std::vector<std::uint8_t>, std::vector<std::uint16_t>,
                              std::vector<float>>;

  int width = 0;
  int height = 0;
  int channels = 1;
  Pixels pixels = std::vector<std::uint8_t>{};

  PixelType type() const;
  std::size_t sample_count() const {
    return static_cast<std::size_t>(width) * height * channels;
  }
  double at(int x, int y, int c) const;

  friend bool operator==(const Image&, const Image&) = default;
};

enum class NormalizationMode { kNone, kUnitRange };

NormalizationMode parse_normalization(std::string_view text);
std::string_view normalization_name(NormalizationMode mode);

// kNone returns the input unchanged. kUnitRange divides integer pixels by
// the type's maximum (255 or 65535) and yields float pixels in [0, 1];
// float input is rejected with kUnsupportedDtype.
Image normalize_image(const Image& image, NormalizationMode mode);

// Same, for a batch; mixing pixel types is kUnsupportedDtype.
std::vector<Image> normalize_images(std::span<const Image> images,
                                    NormalizationMode mode);

// 8- or 16-bit grayscale/RGB; palettes are expanded and alpha dropped.
Image load_png(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Image& image);

// *.png files of a directory sorted by name, paired with their stems.
std::vector<std::pair<std::string, Image>> load_image_dir(
    const std::filesystem::path& dir);

}  // namespace genhub::metrics
