#include "ucgan/imaging/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ucgan/nn/ops.hpp"

namespace ucgan::imaging {

namespace {
constexpr double kKeysA = -0.5;

void require_scale(Ratio scale) {
  if (scale.num <= 0 || scale.den <= 0) {
    throw ContractError("bicubic_resize: scale must be positive, got " + std::to_string(scale.num) +
                        "/" + std::to_string(scale.den));
  }
}
}  // namespace

double keys_cubic(double x) {
  const double t = std::abs(x);
  if (t <= 1.0) return ((kKeysA + 2.0) * t - (kKeysA + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((kKeysA * t - 5.0 * kKeysA) * t + 8.0 * kKeysA) * t - 4.0 * kKeysA;
  return 0.0;
}

AxisOperator bicubic_operator(std::size_t length, Ratio scale) {
  require_scale(scale);
  const std::size_t out_len = length * static_cast<std::size_t>(scale.num) / static_cast<std::size_t>(scale.den);
  if (out_len == 0) throw ContractError("bicubic_resize: scale collapses an axis of length " + std::to_string(length));
  AxisOperator op;
  op.in_size = length;
  op.out_size = out_len;
  op.taps.resize(out_len);
  const double inv_scale = static_cast<double>(scale.den) / static_cast<double>(scale.num);
  const long last = static_cast<long>(length) - 1;
  for (std::size_t d = 0; d < out_len; ++d) {
    const double src = (static_cast<double>(d) + 0.5) * inv_scale - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    auto& taps = op.taps[d];
    for (int k = -1; k <= 2; ++k) {
      const double w = keys_cubic(t - k);
      if (w == 0.0) continue;
      const auto idx = static_cast<std::uint32_t>(std::clamp(static_cast<long>(base) + k, 0L, last));
      auto same = std::find_if(taps.begin(), taps.end(), [&](const AxisTap& a) { return a.index == idx; });
      if (same != taps.end()) {
        same->weight += w;
      } else {
        taps.push_back({idx, w});
      }
    }
  }
  return op;
}

template <typename T>
nn::Tensor<T> bicubic_resize(const nn::Tensor<T>& img, Ratio scale) {
  const nn::Shape s = img.shape();
  return apply_separable(img, bicubic_operator(s.h, scale), bicubic_operator(s.w, scale));
}

RasterImage bicubic_resize(const RasterImage& img, Ratio scale) {
  return to_raster(bicubic_resize(to_tensor<double>(img), scale), img.bit_depth);
}

template <typename T>
nn::Tensor<T> replicate_pan(const nn::Tensor<T>& pan) {
  if (pan.shape().c != 1) {
    throw ContractError("replicate_pan: expected a single-channel PAN, got " + pan.shape().str());
  }
  return nn::gather_channels(pan, {0, 0, 0, 0});
}

template <typename T>
nn::Tensor<T> degrade(const nn::Tensor<T>& img, const FilterSpec& blur) {
  return bicubic_resize(low_pass(img, blur), kDownsample4);
}

RasterImage degrade(const RasterImage& img, const FilterSpec& blur) {
  return to_raster(degrade(to_tensor<double>(img), blur), img.bit_depth);
}

std::pair<RasterImage, RasterImage> wald_degrade(const RasterImage& pan, const RasterImage& ms,
                                                 const FilterSpec& blur) {
  if (pan.bands != 1) throw ContractError("wald_degrade: PAN must have one band");
  if (ms.width % 4 != 0 || ms.height % 4 != 0) {
    throw ContractError("wald_degrade: MS size " + std::to_string(ms.width) + "x" +
                        std::to_string(ms.height) + " is not divisible by 4");
  }
  if (pan.width != 4 * ms.width || pan.height != 4 * ms.height) {
    throw ContractError("wald_degrade: PAN " + std::to_string(pan.width) + "x" + std::to_string(pan.height) +
                        " is not 4x the MS " + std::to_string(ms.width) + "x" + std::to_string(ms.height));
  }
  return {degrade(pan, blur), degrade(ms, blur)};
}

template nn::Tensor<float> bicubic_resize<float>(const nn::Tensor<float>&, Ratio);
template nn::Tensor<double> bicubic_resize<double>(const nn::Tensor<double>&, Ratio);
template nn::Tensor<float> replicate_pan<float>(const nn::Tensor<float>&);
template nn::Tensor<double> replicate_pan<double>(const nn::Tensor<double>&);
template nn::Tensor<float> degrade<float>(const nn::Tensor<float>&, const FilterSpec&);
template nn::Tensor<double> degrade<double>(const nn::Tensor<double>&, const FilterSpec&);

}  // namespace ucgan::imaging
