#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ucgan/imaging/raster.hpp"

namespace ucgan::data {

using imaging::RasterImage;

/// Aligned PAN / LR MS pair. `reference` holds the HR MS ground truth and is
/// populated only for Wald-protocol data (or synthetic scenes loaded for evaluation).
struct ScenePair {
  std::string id;
  RasterImage pan;
  RasterImage lrms;
  std::optional<RasterImage> reference;

  /// Throws ContractError unless pan is 1-band and exactly 4x the 4-band lrms,
  /// and the reference (if any) is 4-band at PAN size. Rasters are validated too.
  void validate() const;
};

enum class Mode { full_scale, wald };

std::string to_string(Mode mode);
/// Accepts "full_scale" / "full" and "wald"; throws ContractError otherwise.
Mode parse_mode(const std::string& text);

/// Full-resolution source image: PAN (H x W) and MS (H/4 x W/4) as delivered by the sensor.
struct SourceScene {
  std::string id;
  RasterImage pan;
  RasterImage ms;
};

struct DatasetSpec {
  std::filesystem::path source_dir;  // directory holding manifest.json for the sources
  Mode mode = Mode::full_scale;
  std::uint32_t train_patch = 256;  // PAN side; the MS side is train_patch / 4
  std::uint32_t test_patch = 400;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draws `spec.count` patches uniformly (scene, then MS window) with a seeded
/// RNG. The PAN window's top-left is 4x the MS window's. In Wald mode every
/// patch is degraded and carries the original MS patch as reference.
std::vector<ScenePair> sample_training_patches(const std::vector<SourceScene>& sources, const DatasetSpec& spec);
/// Same, reading the sources from `spec.source_dir / "manifest.json"`.
std::vector<ScenePair> sample_training_patches(const DatasetSpec& spec);

/// Non-overlapping row-major tiles of every source at the test patch size;
/// right and bottom remainders are dropped.
std::vector<ScenePair> tile_test_patches(const std::vector<SourceScene>& sources, const DatasetSpec& spec);
std::vector<ScenePair> tile_test_patches(const DatasetSpec& spec);

// ---- manifests ------------------------------------------------------------

/// manifest.json: {"mode": ..., "bit_depth": ..., "pairs": [{"id", "pan", "ms", "reference"?}]}
/// with paths relative to the manifest's directory.
struct Manifest {
  Mode mode = Mode::full_scale;
  std::uint16_t bit_depth = 10;
  struct Entry {
    std::string id;
    std::filesystem::path pan;
    std::filesystem::path ms;
    std::optional<std::filesystem::path> reference;
  };
  std::vector<Entry> entries;
};

Manifest read_manifest(const std::filesystem::path& path);

/// Loads every pair. References are read only when `with_reference` is set;
/// otherwise the field stays empty even if the manifest lists one.
std::vector<ScenePair> load_pairs(const std::filesystem::path& manifest_path, bool with_reference);

/// Loads the manifest entries as full-resolution sources (ms entry at PAN/4).
std::vector<SourceScene> load_sources(const std::filesystem::path& manifest_path);

/// Writes <dir>/<id>_pan.msr, <id>_ms.msr, optional <id>_ref.msr and <dir>/manifest.json.
void write_dataset(const std::filesystem::path& dir, const std::vector<ScenePair>& pairs, Mode mode);

// ---- synthetic scenes -----------------------------------------------------

struct SynthScene {
  RasterImage pan;    // width x height, 1 band
  RasterImage lrms;   // (width/4) x (height/4), 4 bands
  RasterImage hr_ms;  // width x height, 4 bands; hidden ground truth
};

/// Equal band weights of the synthetic PAN sensor.
inline constexpr double kSynthPanWeights[4] = {0.25, 0.25, 0.25, 0.25};

/// Procedural 4-band scene: hard-edged regions with per-region spectral
/// signatures, smooth blobs, a brightness gradient and fine texture shared by
/// all bands. PAN is the rounded weighted band sum; LR MS is the Wald
/// degradation of the HR MS. Width and height must be divisible by 4.
SynthScene synth_scene(std::uint32_t width, std::uint32_t height, std::uint64_t seed, std::uint16_t bit_depth);

/// PAN from an HR MS image with kSynthPanWeights, rounded and clamped.
RasterImage synth_pan(const RasterImage& hr_ms);

/// `count` synthetic pairs with ids "synth_000", ...; seeds are seed + index.
/// References carry the hidden HR MS.
std::vector<ScenePair> synth_dataset(std::size_t count, std::uint32_t pan_size, std::uint64_t seed,
                                     std::uint16_t bit_depth);

}  // namespace ucgan::data
