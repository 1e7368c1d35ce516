#pragma once

#include <filesystem>
#include <utility>

#include "ucgan/imaging/raster.hpp"

namespace ucgan::imaging {

/// MSR container, little-endian:
///   "MSR1" | u32 width | u32 height | u16 bands | u16 bit_depth | u16 samples (band-sequential)
RasterImage load_raster(const std::filesystem::path& path);
void save_raster(const RasterImage& img, const std::filesystem::path& path);

/// Percentile pair, in percent, for the linear display stretch.
struct Stretch {
  double low = 2.0;
  double high = 98.0;
};

/// Writes an 8-bit RGB PNG. 4-band images map bands (3, 2, 1) to (R, G, B);
/// single-band images are written as gray. Each band is stretched linearly
/// between its own percentiles; a flat band maps to mid-gray.
void export_rgb_png(const RasterImage& img, const std::filesystem::path& path, Stretch stretch = {});

}  // namespace ucgan::imaging
