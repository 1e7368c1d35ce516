#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "ucgan/data/dataset.hpp"
#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"

namespace ucgan::data {

namespace {

struct Blob {
  double cx, cy, radius, weight;
  std::size_t material;
};

}  // namespace

RasterImage synth_pan(const RasterImage& hr_ms) {
  if (hr_ms.bands != 4) throw ContractError("synth_pan: expected a 4-band image");
  RasterImage pan(hr_ms.width, hr_ms.height, 1, hr_ms.bit_depth);
  for (std::size_t i = 0; i < hr_ms.plane_size(); ++i) {
    double acc = 0.0;
    for (std::size_t b = 0; b < 4; ++b) acc += kSynthPanWeights[b] * hr_ms.pixels[b * hr_ms.plane_size() + i];
    pan.pixels[i] = imaging::quantize(acc, hr_ms.bit_depth);
  }
  return pan;
}

SynthScene synth_scene(std::uint32_t width, std::uint32_t height, std::uint64_t seed, std::uint16_t bit_depth) {
  if (width == 0 || height == 0 || width % 4 != 0 || height % 4 != 0) {
    throw ContractError("synth_scene: width and height must be positive multiples of 4");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double peak = 0.6 * ((1u << bit_depth) - 1u);
  const double w = width, h = height;

  constexpr std::size_t kMaterials = 4;
  std::array<std::array<double, 4>, kMaterials> signature{};
  for (auto& sig : signature) {
    const double level = 0.35 + 0.55 * u(rng);
    for (std::size_t b = 0; b < 4; ++b) sig[b] = std::clamp(level * (0.75 + 0.5 * u(rng)), 0.15, 1.0);
  }

  // Hard-edged regions: nearest of a few random sites.
  const std::size_t sites = 5 + static_cast<std::size_t>(u(rng) * 4);
  std::vector<std::array<double, 2>> site_pos(sites);
  std::vector<std::size_t> site_mat(sites);
  for (std::size_t s = 0; s < sites; ++s) {
    site_pos[s] = {u(rng) * w, u(rng) * h};
    site_mat[s] = static_cast<std::size_t>(u(rng) * kMaterials) % kMaterials;
  }

  std::vector<Blob> blobs(4);
  for (auto& b : blobs) {
    b = {u(rng) * w, u(rng) * h, (0.08 + 0.17 * u(rng)) * std::min(w, h), 0.4 + 0.8 * u(rng),
         static_cast<std::size_t>(u(rng) * kMaterials) % kMaterials};
  }

  const double theta = 2.0 * std::numbers::pi * u(rng);
  const double fx = 0.8 + 1.2 * u(rng), fy = 0.8 + 1.2 * u(rng), px = 6.28 * u(rng), py = 6.28 * u(rng);

  // Fine texture: white noise smoothed by a 3x3 box, shared by all bands.
  std::vector<double> noise(width * height), texture(width * height);
  for (auto& v : noise) v = u(rng) - 0.5;
  for (std::uint32_t y = 0; y < height; ++y)
    for (std::uint32_t x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const auto yy = std::clamp<long>(long(y) + dy, 0, long(height) - 1);
          const auto xx = std::clamp<long>(long(x) + dx, 0, long(width) - 1);
          acc += noise[yy * width + xx];
        }
      texture[y * width + x] = 0.06 * std::sin(fx * x + px) * std::sin(fy * y + py) + 0.12 * acc / 9.0;
    }

  RasterImage hr(width, height, 4, bit_depth);
  for (std::uint32_t y = 0; y < height; ++y)
    for (std::uint32_t x = 0; x < width; ++x) {
      std::array<double, kMaterials> abundance{};
      std::size_t nearest = 0;
      double best = 1e300;
      for (std::size_t s = 0; s < sites; ++s) {
        const double d = std::hypot(x - site_pos[s][0], y - site_pos[s][1]);
        if (d < best) {
          best = d;
          nearest = s;
        }
      }
      abundance[site_mat[nearest]] = 1.0;
      double total = 1.0;
      for (const auto& b : blobs) {
        const double r2 = (std::pow(x - b.cx, 2) + std::pow(y - b.cy, 2)) / (b.radius * b.radius);
        const double g = b.weight * std::exp(-0.5 * r2);
        abundance[b.material] += g;
        total += g;
      }
      const double ramp = 1.0 + 0.25 * (std::cos(theta) * x / w + std::sin(theta) * y / h - 0.5);
      const double tex = 1.0 + texture[y * width + x];
      for (std::size_t b = 0; b < 4; ++b) {
        double mix = 0.0;
        for (std::size_t k = 0; k < kMaterials; ++k) mix += abundance[k] * signature[k][b];
        hr.at(b, y, x) = imaging::quantize(peak * ramp * tex * mix / total, bit_depth);
      }
    }

  SynthScene scene;
  scene.pan = synth_pan(hr);
  scene.lrms = imaging::degrade(hr);
  scene.hr_ms = std::move(hr);
  return scene;
}

std::vector<ScenePair> synth_dataset(std::size_t count, std::uint32_t pan_size, std::uint64_t seed,
                                     std::uint16_t bit_depth) {
  std::vector<ScenePair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto scene = synth_scene(pan_size, pan_size, seed + i, bit_depth);
    char id[32];
    std::snprintf(id, sizeof id, "synth_%03zu", i);
    out.push_back({id, std::move(scene.pan), std::move(scene.lrms), std::move(scene.hr_ms)});
  }
  return out;
}

}  // namespace ucgan::data
