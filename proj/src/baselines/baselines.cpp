#include "ucgan/baselines/baselines.hpp"

#include <cmath>

#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"

namespace ucgan::baselines {

namespace {

constexpr double kMinDivisor = 1.0;

std::vector<double> match_moments(std::span<const double> src, std::span<const double> target) {
  const double n = static_cast<double>(src.size());
  double ms = 0, mt = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    mt += target[i];
  }
  ms /= n;
  mt /= n;
  double vs = 0, vt = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    vs += (src[i] - ms) * (src[i] - ms);
    vt += (target[i] - mt) * (target[i] - mt);
  }
  const double ss = std::sqrt(vs / n), st = std::sqrt(vt / n);
  std::vector<double> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = ss > 0.0 ? (src[i] - ms) * st / ss + mt : mt;
  return out;
}

}  // namespace

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::ihs: return "ihs";
    case BaselineKind::brovey: return "brovey";
    case BaselineKind::hpf: return "hpf";
    case BaselineKind::sfim: return "sfim";
  }
  return "?";
}

BaselineKind parse_baseline_kind(const std::string& text) {
  for (auto k : {BaselineKind::ihs, BaselineKind::brovey, BaselineKind::hpf, BaselineKind::sfim})
    if (to_string(k) == text) return k;
  throw ContractError("unknown baseline '" + text + "' (expected ihs, brovey, hpf or sfim)");
}

RasterImage bicubic_baseline(const RasterImage& lrms) {
  lrms.validate();
  return imaging::bicubic_resize(lrms, imaging::kUpsample4);
}

BaselineResult fuse_baseline(BaselineKind kind, const RasterImage& pan, const RasterImage& lrms,
                             const imaging::FilterSpec& filter) {
  pan.validate();
  lrms.validate();
  if (pan.bands != 1 || lrms.bands != 4) throw ContractError("baseline: expected 1-band PAN and 4-band MS");
  if (pan.width != 4 * lrms.width || pan.height != 4 * lrms.height) {
    throw ContractError("baseline: PAN is not 4x the MS resolution");
  }
  filter.validate();
  const auto up_t = imaging::bicubic_resize(imaging::to_tensor<double>(lrms), imaging::kUpsample4);
  const auto pan_t = imaging::to_tensor<double>(pan);
  const auto up = up_t.data();
  const auto p = pan_t.data();
  const std::size_t plane = pan.plane_size();

  std::vector<double> intensity(plane, 0.0);
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t i = 0; i < plane; ++i) intensity[i] += up[b * plane + i] / 4.0;

  std::vector<double> out(up.begin(), up.end());
  BaselineResult result;
  switch (kind) {
    case BaselineKind::ihs: {
      const auto pm = match_moments(p, intensity);
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t i = 0; i < plane; ++i) out[b * plane + i] += pm[i] - intensity[i];
      break;
    }
    case BaselineKind::brovey: {
      const auto pm = match_moments(p, intensity);
      for (std::size_t i = 0; i < plane; ++i) {
        if (intensity[i] < kMinDivisor) {
          ++result.guarded_pixels;
          continue;
        }
        const double ratio = pm[i] / intensity[i];
        for (std::size_t b = 0; b < 4; ++b) out[b * plane + i] *= ratio;
      }
      break;
    }
    case BaselineKind::hpf: {
      const auto hp = imaging::high_pass(pan_t, filter);
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t i = 0; i < plane; ++i) out[b * plane + i] += hp.data()[i];
      break;
    }
    case BaselineKind::sfim: {
      const auto lp = imaging::low_pass(pan_t, filter);
      for (std::size_t i = 0; i < plane; ++i) {
        if (lp.data()[i] < kMinDivisor) {
          ++result.guarded_pixels;
          continue;
        }
        const double ratio = p[i] / lp.data()[i];
        for (std::size_t b = 0; b < 4; ++b) out[b * plane + i] *= ratio;
      }
      break;
    }
  }
  result.fused = imaging::to_raster(nn::Tensor<double>(up_t.shape(), std::move(out)), lrms.bit_depth);
  return result;
}

}  // namespace ucgan::baselines
