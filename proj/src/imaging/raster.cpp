#include "ucgan/imaging/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucgan::imaging {

RasterImage::RasterImage(std::uint32_t w, std::uint32_t h, std::uint16_t band_count,
                         std::uint16_t depth, std::uint16_t fill)
    : width(w), height(h), bands(band_count), bit_depth(depth),
      pixels(std::size_t{w} * h * band_count, fill) {}

void RasterImage::validate() const {
  if (bands != 1 && bands != 4) {
    throw ValidationError("raster: band count must be 1 or 4, got " + std::to_string(bands));
  }
  if (bit_depth < kMinBitDepth || bit_depth > kMaxBitDepth) {
    throw ValidationError("raster: unsupported bit depth " + std::to_string(bit_depth));
  }
  if (pixels.size() != plane_size() * bands) {
    throw ValidationError("raster: payload holds " + std::to_string(pixels.size()) +
                          " samples, expected " + std::to_string(plane_size() * bands));
  }
  const std::uint32_t limit = 1u << bit_depth;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (pixels[i] >= limit) {
      throw ValidationError("raster: sample " + std::to_string(i) + " = " + std::to_string(pixels[i]) +
                            " exceeds " + std::to_string(bit_depth) + "-bit range");
    }
  }
}

RasterImage RasterImage::crop(std::uint32_t x0, std::uint32_t y0, std::uint32_t w,
                              std::uint32_t h) const {
  if (std::uint64_t{x0} + w > width || std::uint64_t{y0} + h > height) {
    throw ContractError("raster: crop window exceeds image bounds");
  }
  RasterImage out(w, h, bands, bit_depth);
  for (std::size_t b = 0; b < bands; ++b)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) out.at(b, y, x) = at(b, y0 + y, x0 + x);
  return out;
}

std::uint16_t quantize(double v, std::uint16_t bit_depth) {
  const double hi = static_cast<double>((1u << bit_depth) - 1u);
  const double r = std::round(v);  // half away from zero
  if (!(r > 0.0)) return 0;        // also maps NaN to 0
  return static_cast<std::uint16_t>(std::min(r, hi));
}

template <typename T>
nn::Tensor<T> to_tensor(const RasterImage& img) {
  std::vector<T> values(img.pixels.begin(), img.pixels.end());
  return nn::Tensor<T>(nn::Shape{1, img.bands, img.height, img.width}, std::move(values));
}

template <typename T>
RasterImage to_raster(const nn::Tensor<T>& t, std::uint16_t bit_depth, std::size_t item) {
  const nn::Shape s = t.shape();
  if (item >= s.n) throw DimensionError("to_raster: item beyond batch (axis 0) of " + s.str());
  RasterImage out(static_cast<std::uint32_t>(s.w), static_cast<std::uint32_t>(s.h),
                  static_cast<std::uint16_t>(s.c), bit_depth);
  auto v = t.data();
  const std::size_t k = s.c * s.plane();
  for (std::size_t i = 0; i < k; ++i) out.pixels[i] = quantize(static_cast<double>(v[item * k + i]), bit_depth);
  return out;
}

template nn::Tensor<float> to_tensor<float>(const RasterImage&);
template nn::Tensor<double> to_tensor<double>(const RasterImage&);
template RasterImage to_raster<float>(const nn::Tensor<float>&, std::uint16_t, std::size_t);
template RasterImage to_raster<double>(const nn::Tensor<double>&, std::uint16_t, std::size_t);

}  // namespace ucgan::imaging
