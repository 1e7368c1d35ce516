#include "ucgan/error.hpp"
#include "ucgan/imaging/io.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/metrics/metrics.hpp"
#include "ucgan/train/train.hpp"

namespace ucgan::train {

imaging::RasterImage pansharpen(const net::Generator<float>& g, const imaging::RasterImage& pan,
                                const imaging::RasterImage& lrms) {
  data::ScenePair pair{"input", pan, lrms, std::nullopt};
  pair.validate();
  nn::NoGradGuard no_grad;
  const auto fused = g(imaging::to_tensor<float>(pan), imaging::to_tensor<float>(lrms));
  return imaging::to_raster(fused, lrms.bit_depth);
}

void pansharpen_files(const std::filesystem::path& checkpoint, const std::filesystem::path& pan_path,
                      const std::filesystem::path& ms_path, const std::filesystem::path& out_path,
                      const std::filesystem::path& png_path) {
  const auto g = net::load_generator(checkpoint);
  const auto fused = pansharpen(g, imaging::load_raster(pan_path), imaging::load_raster(ms_path));
  imaging::save_raster(fused, out_path);
  if (!png_path.empty()) imaging::export_rgb_png(fused, png_path);
}

FuseMethod generator_method(const net::Generator<float>& g) {
  return [g](const data::ScenePair& p) { return pansharpen(g, p.pan, p.lrms); };
}

FuseMethod baseline_method(baselines::BaselineKind kind) {
  return [kind](const data::ScenePair& p) { return baselines::fuse_baseline(kind, p.pan, p.lrms).fused; };
}

FuseMethod bicubic_method() {
  return [](const data::ScenePair& p) { return baselines::bicubic_baseline(p.lrms); };
}

FuseMethod reference_method() {
  return [](const data::ScenePair& p) {
    if (!p.reference) throw ContractError("pair " + p.id + " has no reference");
    return *p.reference;
  };
}

metrics::PairMetrics evaluate_pair(const imaging::RasterImage& fused, const data::ScenePair& pair,
                                   bool with_reference, const metrics::QnrParams& params) {
  fused.validate();
  if (fused.bands != 4 || fused.width != pair.pan.width || fused.height != pair.pan.height) {
    throw DimensionError("fused image of " + pair.id + " must be 4 bands at PAN size");
  }
  const auto f = imaging::to_tensor<double>(fused);
  const auto q = metrics::qnr(f, imaging::to_tensor<double>(pair.lrms), imaging::to_tensor<double>(pair.pan), {},
                              params);
  metrics::PairMetrics m;
  m.id = pair.id;
  m.d_lambda = q.d_lambda;
  m.d_s = q.d_s;
  m.qnr = q.qnr;
  if (with_reference) {
    if (!pair.reference) throw ContractError("pair " + pair.id + " has no reference for reduced-scale metrics");
    const auto r = imaging::to_tensor<double>(*pair.reference);
    m.sam_deg = metrics::sam(r, f);
    m.ergas = metrics::ergas(r, f);
    m.ssim = metrics::ssim(r, f, static_cast<double>(pair.reference->max_value()));
  }
  return m;
}

metrics::MetricReport evaluate(const std::string& method, const FuseMethod& fuse,
                               const std::vector<data::ScenePair>& pairs, data::Mode mode,
                               const metrics::QnrParams& params) {
  metrics::MetricReport report;
  report.method = method;
  report.mode = data::to_string(mode);
  const bool with_reference = mode == data::Mode::wald;
  for (const auto& p : pairs) {
    p.validate();
    report.pairs.push_back(evaluate_pair(fuse(p), p, with_reference, params));
  }
  return report;
}

}  // namespace ucgan::train
