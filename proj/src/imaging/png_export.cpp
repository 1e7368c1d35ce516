#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

#include "ucgan/imaging/io.hpp"

namespace ucgan::imaging {

namespace {

std::vector<std::uint8_t> stretch_band(const RasterImage& img, std::size_t band, Stretch stretch) {
  const std::size_t n = img.plane_size();
  const auto first = img.pixels.begin() + static_cast<std::ptrdiff_t>(band * n);
  std::vector<std::uint16_t> sorted(first, first + static_cast<std::ptrdiff_t>(n));
  std::sort(sorted.begin(), sorted.end());
  auto rank = [&](double pct) {
    const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(n - 1);
    return static_cast<double>(sorted[static_cast<std::size_t>(std::lround(pos))]);
  };
  const double lo = rank(stretch.low);
  const double hi = rank(stretch.high);
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (hi <= lo) {
      out[i] = 128;
      continue;
    }
    const double v = (static_cast<double>(first[static_cast<std::ptrdiff_t>(i)]) - lo) / (hi - lo) * 255.0;
    out[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

}  // namespace

void export_rgb_png(const RasterImage& img, const std::filesystem::path& path, Stretch stretch) {
  img.validate();
  if (img.plane_size() == 0) throw ContractError("png: empty image");
  std::array<std::vector<std::uint8_t>, 3> rgb;
  if (img.bands == 4) {
    // bands (3, 2, 1) in 1-based numbering
    rgb = {stretch_band(img, 2, stretch), stretch_band(img, 1, stretch), stretch_band(img, 0, stretch)};
  } else {
    auto gray = stretch_band(img, 0, stretch);
    rgb = {gray, gray, gray};
  }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw FormatError("png: cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("png: libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("png: encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(std::size_t{img.width} * 3);
  for (std::uint32_t y = 0; y < img.height; ++y) {
    for (std::uint32_t x = 0; x < img.width; ++x) {
      const std::size_t i = std::size_t{y} * img.width + x;
      for (std::size_t c = 0; c < 3; ++c) row[x * 3 + c] = rgb[c][i];
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace ucgan::imaging
