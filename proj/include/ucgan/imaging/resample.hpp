#pragma once

#include <utility>

#include "ucgan/imaging/filters.hpp"
#include "ucgan/imaging/raster.hpp"

namespace ucgan::imaging {

/// Positive rational scale factor num/den.
struct Ratio {
  int num = 1;
  int den = 1;
  bool operator==(const Ratio&) const = default;
};

inline constexpr Ratio kUpsample4{4, 1};
inline constexpr Ratio kDownsample4{1, 4};

/// Keys cubic convolution kernel with a = -0.5 (Catmull-Rom).
double keys_cubic(double x);

/// 1-D bicubic resampling operator. Output length is floor(length * scale);
/// sample centers map as src = (dst + 0.5) / scale - 0.5; taps clamp to the edge.
AxisOperator bicubic_operator(std::size_t length, Ratio scale);

/// Separable bicubic resize of every plane; a fixed linear (differentiable) map.
template <typename T>
nn::Tensor<T> bicubic_resize(const nn::Tensor<T>& img, Ratio scale);

/// Bicubic resize at integer precision (round half away from zero, clamp).
RasterImage bicubic_resize(const RasterImage& img, Ratio scale);

/// (N, 1, H, W) -> (N, 4, H, W) with four identical channels.
template <typename T>
nn::Tensor<T> replicate_pan(const nn::Tensor<T>& pan);

/// Blur with `blur` then bicubic x1/4. Float path, no rounding.
template <typename T>
nn::Tensor<T> degrade(const nn::Tensor<T>& img, const FilterSpec& blur = wald_blur());

/// Integer path of degrade().
RasterImage degrade(const RasterImage& img, const FilterSpec& blur = wald_blur());

/// Wald-protocol degradation of an aligned (PAN, MS) pair; returns (pan_lr, ms_lr).
/// The input MS becomes the reference for the returned pair.
std::pair<RasterImage, RasterImage> wald_degrade(const RasterImage& pan, const RasterImage& ms,
                                                 const FilterSpec& blur = wald_blur());

}  // namespace ucgan::imaging
