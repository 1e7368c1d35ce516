#include <random>
#include <string>

#include "ucgan/data/dataset.hpp"
#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"

namespace ucgan::data {

namespace {

void check_source(const SourceScene& s, std::uint32_t pan_side) {
  ScenePair probe{s.id, s.pan, s.ms, std::nullopt};
  probe.validate();
  if (s.pan.width < pan_side || s.pan.height < pan_side) {
    throw ContractError("source " + s.id + " (" + std::to_string(s.pan.width) + "x" + std::to_string(s.pan.height) +
                        ") is smaller than the " + std::to_string(pan_side) + " patch");
  }
}

ScenePair cut(const SourceScene& s, std::uint32_t ms_x, std::uint32_t ms_y, std::uint32_t pan_side, Mode mode,
              std::string id) {
  const std::uint32_t ms_side = pan_side / 4;
  ScenePair p;
  p.id = std::move(id);
  RasterImage pan = s.pan.crop(4 * ms_x, 4 * ms_y, pan_side, pan_side);
  RasterImage ms = s.ms.crop(ms_x, ms_y, ms_side, ms_side);
  if (mode == Mode::wald) {
    auto [pan_lr, ms_lr] = imaging::wald_degrade(pan, ms);
    p.pan = std::move(pan_lr);
    p.lrms = std::move(ms_lr);
    p.reference = std::move(ms);
  } else {
    p.pan = std::move(pan);
    p.lrms = std::move(ms);
  }
  return p;
}

}  // namespace

std::vector<ScenePair> sample_training_patches(const std::vector<SourceScene>& sources, const DatasetSpec& spec) {
  spec.validate();
  if (sources.empty()) throw ContractError("sample_training_patches: no source scenes");
  for (const auto& s : sources) check_source(s, spec.train_patch);
  const std::uint32_t ms_side = spec.train_patch / 4;
  std::mt19937_64 rng(spec.seed);
  std::vector<ScenePair> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const auto& s = sources[std::uniform_int_distribution<std::size_t>(0, sources.size() - 1)(rng)];
    const auto x = std::uniform_int_distribution<std::uint32_t>(0, s.ms.width - ms_side)(rng);
    const auto y = std::uniform_int_distribution<std::uint32_t>(0, s.ms.height - ms_side)(rng);
    out.push_back(cut(s, x, y, spec.train_patch, spec.mode, s.id + "_p" + std::to_string(i)));
  }
  return out;
}

std::vector<ScenePair> sample_training_patches(const DatasetSpec& spec) {
  return sample_training_patches(load_sources(spec.source_dir / "manifest.json"), spec);
}

std::vector<ScenePair> tile_test_patches(const std::vector<SourceScene>& sources, const DatasetSpec& spec) {
  spec.validate();
  std::vector<ScenePair> out;
  const std::uint32_t ms_side = spec.test_patch / 4;
  for (const auto& s : sources) {
    check_source(s, spec.test_patch);
    const std::uint32_t rows = s.pan.height / spec.test_patch, cols = s.pan.width / spec.test_patch;
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) {
        out.push_back(cut(s, c * ms_side, r * ms_side, spec.test_patch, spec.mode,
                          s.id + "_r" + std::to_string(r) + "_c" + std::to_string(c)));
      }
  }
  return out;
}

std::vector<ScenePair> tile_test_patches(const DatasetSpec& spec) {
  return tile_test_patches(load_sources(spec.source_dir / "manifest.json"), spec);
}

}  // namespace ucgan::data
