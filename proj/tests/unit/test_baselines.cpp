#include <gtest/gtest.h>

#include <cmath>
#include <utility>

#include "ucgan/baselines/baselines.hpp"
#include "ucgan/data/dataset.hpp"
#include "ucgan/error.hpp"
#include "ucgan/imaging/io.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/metrics/metrics.hpp"

using namespace ucgan;
using namespace ucgan::baselines;
using imaging::RasterImage;

namespace {

constexpr BaselineKind kKinds[] = {BaselineKind::ihs, BaselineKind::brovey, BaselineKind::hpf, BaselineKind::sfim};

data::ScenePair scene(std::uint64_t seed, std::uint32_t size = 64) {
  auto s = data::synth_scene(size, size, seed, 11);
  return {"s", s.pan, s.lrms, s.hr_ms};
}

int max_abs_dn(const RasterImage& a, const RasterImage& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) m = std::max(m, std::abs(int(a.pixels[i]) - int(b.pixels[i])));
  return m;
}

double sam_of(const RasterImage& ref, const RasterImage& fused) {
  return metrics::sam(imaging::to_tensor<double>(ref), imaging::to_tensor<double>(fused));
}

}  // namespace

TEST(Baselines, ParseKind) {
  for (auto k : kKinds) EXPECT_EQ(parse_baseline_kind(to_string(k)), k);
  EXPECT_THROW(parse_baseline_kind("pca"), ContractError);
}

TEST(Baselines, ConstantPanLeavesDetailMethodsAtBicubic) {
  auto s = scene(1);
  RasterImage flat(s.pan.width, s.pan.height, 1, s.pan.bit_depth, 700);
  const auto up = bicubic_baseline(s.lrms);
  for (auto k : {BaselineKind::hpf, BaselineKind::sfim}) {
    auto r = fuse_baseline(k, flat, s.lrms);
    EXPECT_EQ(r.fused, up) << to_string(k);
    EXPECT_EQ(r.guarded_pixels, 0u);
  }
}

TEST(Baselines, PanEqualToIntensityLeavesComponentMethodsNearBicubic) {
  auto s = scene(2);
  const auto up = bicubic_baseline(s.lrms);
  auto up_t = imaging::bicubic_resize(imaging::to_tensor<double>(s.lrms), imaging::kUpsample4);
  RasterImage pan(s.pan.width, s.pan.height, 1, s.pan.bit_depth);
  for (std::size_t i = 0; i < pan.plane_size(); ++i) {
    double acc = 0;
    for (std::size_t b = 0; b < 4; ++b) acc += up_t.data()[b * pan.plane_size() + i] / 4.0;
    pan.pixels[i] = static_cast<std::uint16_t>(std::lround(std::clamp(acc, 0.0, double(pan.max_value()))));
  }
  for (auto k : {BaselineKind::ihs, BaselineKind::brovey}) {
    EXPECT_LE(max_abs_dn(fuse_baseline(k, pan, s.lrms).fused, up), 2) << to_string(k);
  }
}

TEST(Baselines, OutputWithinBitDepth) {
  auto s = scene(3);
  RasterImage hot = s.pan;
  for (std::size_t i = 0; i < hot.plane_size(); i += 3) hot.pixels[i] = hot.max_value();
  for (auto k : kKinds) {
    auto r = fuse_baseline(k, hot, s.lrms);
    EXPECT_NO_THROW(r.fused.validate());
    EXPECT_EQ(r.fused.bands, 4);
    EXPECT_EQ(r.fused.width, s.pan.width);
    EXPECT_EQ(r.fused.bit_depth, s.lrms.bit_depth);
  }
}

TEST(Baselines, DarkPanIsGuarded) {
  auto s = scene(4);
  RasterImage dark(s.pan.width, s.pan.height, 1, s.pan.bit_depth, 0);
  auto r = fuse_baseline(BaselineKind::sfim, dark, s.lrms);
  EXPECT_EQ(r.guarded_pixels, dark.plane_size());
  EXPECT_EQ(r.fused, bicubic_baseline(s.lrms));
}

TEST(Baselines, GeometryChecked) {
  auto s = scene(5);
  auto small = s.pan.crop(0, 0, 32, 32);
  for (auto k : kKinds) EXPECT_THROW(fuse_baseline(k, small, s.lrms), ContractError);
  EXPECT_THROW(fuse_baseline(BaselineKind::hpf, s.lrms, s.lrms), ContractError);
}

// Regression fixture: SAM (degrees) against the hidden reference of synthetic
// scene 7, frozen from the first verified run.
TEST(Baselines, SamRegressionOnSyntheticScene) {
  auto s = scene(7);
  const double bicubic = sam_of(*s.reference, bicubic_baseline(s.lrms));
  EXPECT_TRUE(std::isfinite(bicubic));
  EXPECT_NEAR(bicubic, 0.859978, 1e-5);
  const std::pair<BaselineKind, double> frozen[] = {
      {BaselineKind::ihs, 0.997051}, {BaselineKind::brovey, 0.859770},
      {BaselineKind::hpf, 0.983965}, {BaselineKind::sfim, 0.859217}};
  for (auto [k, expected] : frozen) {
    EXPECT_NEAR(sam_of(*s.reference, fuse_baseline(k, s.pan, s.lrms).fused), expected, 1e-5) << to_string(k);
  }
}
