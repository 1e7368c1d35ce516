#pragma once

#include <cstdint>
#include <vector>

#include "ucgan/nn/tensor.hpp"

namespace ucgan::imaging {

/// Multi-band integer image at native sensor bit depth, band-sequential.
struct RasterImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t bands = 1;
  std::uint16_t bit_depth = 10;
  std::vector<std::uint16_t> pixels;

  RasterImage() = default;
  RasterImage(std::uint32_t w, std::uint32_t h, std::uint16_t band_count, std::uint16_t depth,
              std::uint16_t fill = 0);

  std::uint16_t max_value() const { return static_cast<std::uint16_t>((1u << bit_depth) - 1u); }
  std::size_t plane_size() const { return std::size_t{width} * height; }

  std::uint16_t& at(std::size_t band, std::size_t y, std::size_t x) {
    return pixels[(band * height + y) * width + x];
  }
  std::uint16_t at(std::size_t band, std::size_t y, std::size_t x) const {
    return pixels[(band * height + y) * width + x];
  }

  /// Throws ValidationError when bands, bit depth, payload size or any pixel
  /// breaks the invariants.
  void validate() const;

  RasterImage crop(std::uint32_t x0, std::uint32_t y0, std::uint32_t w, std::uint32_t h) const;

  bool operator==(const RasterImage&) const = default;
};

/// Smallest and largest accepted bit depths.
inline constexpr std::uint16_t kMinBitDepth = 8;
inline constexpr std::uint16_t kMaxBitDepth = 16;

/// (1, bands, height, width) tensor of raw digital numbers.
template <typename T>
nn::Tensor<T> to_tensor(const RasterImage& img);

/// Rounds half away from zero and clamps to [0, 2^bit_depth - 1]. Uses batch item `item`.
template <typename T>
RasterImage to_raster(const nn::Tensor<T>& t, std::uint16_t bit_depth, std::size_t item = 0);

/// Integer conversion used for every float-to-pixel path.
std::uint16_t quantize(double v, std::uint16_t bit_depth);

}  // namespace ucgan::imaging
