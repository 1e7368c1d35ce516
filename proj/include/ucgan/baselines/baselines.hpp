#pragma once

#include <cstddef>
#include <string>

#include "ucgan/imaging/filters.hpp"
#include "ucgan/imaging/raster.hpp"

namespace ucgan::baselines {

using imaging::RasterImage;

enum class BaselineKind { ihs, brovey, hpf, sfim };

std::string to_string(BaselineKind kind);
/// Accepts "ihs", "brovey", "hpf", "sfim".
BaselineKind parse_baseline_kind(const std::string& text);

struct BaselineResult {
  RasterImage fused;
  /// Pixels where a near-zero divisor (below 1 DN) left the upsampled MS unchanged.
  std::size_t guarded_pixels = 0;
};

/// Classical fusion on the x4 bicubic upsampling of the MS, in floating point,
/// rounded and clamped to the MS bit depth on output. I is the band mean of the
/// upsampled MS; PAN' is the PAN matched to I in mean and standard deviation.
///   ihs:    MS_b + (PAN' - I)
///   brovey: MS_b * PAN' / I
///   hpf:    MS_b + high_pass(PAN)
///   sfim:   MS_b * PAN / low_pass(PAN)
BaselineResult fuse_baseline(BaselineKind kind, const RasterImage& pan, const RasterImage& lrms,
                             const imaging::FilterSpec& filter = imaging::averaging_filter());

/// Bicubic x4 upsampling of the MS alone, rounded; the reference point for every method.
RasterImage bicubic_baseline(const RasterImage& lrms);

}  // namespace ucgan::baselines
