// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "metric_oracles.hpp"
#include "test_util.hpp"
#include "ucgan/baselines/baselines.hpp"
#include "ucgan/data/dataset.hpp"
#include "ucgan/error.hpp"
#include "ucgan/imaging/io.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/losses/losses.hpp"
#include "ucgan/metrics/metrics.hpp"
#include "ucgan/net/net.hpp"
#include "ucgan/nn/ops.hpp"
#include "ucgan/train/train.hpp"

using namespace ucgan;
using nn::Shape;
using nn::Tensor;
using ucgan::testing::away_from_zero;
using ucgan::testing::random_tensor;
using ucgan::testing::textured_image;

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str());
  for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename F>
void guarded(Outcome& o, const std::string& what, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    o.require(false, what + " threw: " + e.what());
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- criterion 1 -------------------------------------------------------------

// Central differences over every coordinate of every leaf; returns
// ||analytic - numeric||_inf / max(||analytic||_inf, ||numeric||_inf) worst over leaves.
double fd_relative_error(const std::function<Tensor<double>()>& loss, std::vector<Tensor<double>> leaves,
                         double h = 1e-6) {
  for (auto& l : leaves) l.zero_grad();
  nn::backward(loss());
  double worst = 0.0;
  for (auto& l : leaves) {
    std::vector<double> analytic(l.numel(), 0.0);
    if (l.has_grad()) {
      auto g = l.grad();
      analytic.assign(g.begin(), g.end());
    }
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < l.numel(); ++i) {
      auto v = l.mutable_data();
      const double x0 = v[i];
      double plus, minus;
      {
        nn::NoGradGuard ng;
        v[i] = x0 + h;
        plus = loss().item();
        v[i] = x0 - h;
        minus = loss().item();
        v[i] = x0;
      }
      const double numeric = (plus - minus) / (2 * h);
      err = std::max(err, std::abs(numeric - analytic[i]));
      scale = std::max({scale, std::abs(numeric), std::abs(analytic[i])});
    }
    worst = std::max(worst, scale > 1e-12 ? err / scale : err);
  }
  return worst;
}

Tensor<double> project(const Tensor<double>& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return nn::sum(nn::mul(t, random_tensor<double>(t.shape(), rng)));
}

Outcome criterion_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(100);
  auto leaf = [&](Shape s) { return random_tensor<double>(s, rng, -1.0, 1.0, true); };
  auto kinkless = [&](Shape s) {
    auto t = away_from_zero<double>(s, rng);
    t.set_requires_grad(true);
    return t;
  };
  auto positive = [&](Shape s) { return random_tensor<double>(s, rng, 50.0, 200.0, true); };

  struct Case {
    std::string name;
    std::function<Tensor<double>()> loss;
    std::vector<Tensor<double>> leaves;
  };
  std::vector<Case> cases;
  {
    auto x = leaf({2, 3, 6, 5}), w = leaf({4, 3, 3, 3}), b = leaf({4, 1, 1, 1});
    cases.push_back({"conv2d s1 p1", [=] { return project(nn::conv2d(x, w, b, 1, 1), 1); }, {x, w, b}});
    auto x2 = leaf({1, 2, 9, 9}), w2 = leaf({3, 2, 4, 4}), b2 = leaf({3, 1, 1, 1});
    cases.push_back({"conv2d s2 p1", [=] { return project(nn::conv2d(x2, w2, b2, 2, 1), 2); }, {x2, w2, b2}});
  }
  {
    auto x = leaf({2, 3, 5, 4});
    cases.push_back({"instance_norm", [=] { return project(nn::instance_norm(x), 3); }, {x}});
  }
  {
    auto x = kinkless({2, 3, 4, 4});
    cases.push_back({"relu", [=] { return project(nn::relu(x), 4); }, {x}});
    cases.push_back({"leaky_relu", [=] { return project(nn::leaky_relu(x, 0.2), 5); }, {x}});
    cases.push_back({"abs", [=] { return project(nn::abs(x), 6); }, {x}});
  }
  {
    auto x = leaf({2, 3, 4, 4});
    cases.push_back({"sigmoid", [=] { return project(nn::sigmoid(x), 7); }, {x}});
    cases.push_back({"global_avg_pool", [=] { return project(nn::global_avg_pool(x), 8); }, {x}});
    cases.push_back({"channel_max", [=] { return project(nn::channel_max(x), 9); }, {x}});
    cases.push_back({"channel_mean", [=] { return project(nn::channel_mean(x), 10); }, {x}});
    cases.push_back({"gather_channels", [=] { return project(nn::gather_channels(x, {2, 0, 0, 1}), 11); }, {x}});
    cases.push_back({"scale/add_scalar", [=] { return project(nn::add_scalar(nn::scale(x, 1.7), 0.3), 12); }, {x}});
    cases.push_back({"mean", [=] { return nn::mul(nn::mean(x), nn::mean(x)); }, {x}});
  }
  {
    auto a = leaf({2, 3, 4, 4}), b = leaf({2, 3, 4, 4}), c = leaf({2, 2, 4, 4});
    cases.push_back({"add/sub/mul", [=] { return project(nn::mul(nn::add(a, b), nn::sub(a, b)), 13); }, {a, b}});
    cases.push_back({"concat_channels", [=] { return project(nn::concat_channels(a, c), 14); }, {a, c}});
    auto s = leaf({2, 3, 1, 1});
    cases.push_back({"mul_channelwise", [=] { return project(nn::mul_channelwise(a, s), 15); }, {a, s}});
    auto d = kinkless({2, 3, 4, 4});
    auto zero = Tensor<double>(Shape{2, 3, 4, 4}, 0.0);
    cases.push_back({"l1_mean", [=] { return nn::l1_mean(d, zero); }, {d}});
    cases.push_back({"sq_mean", [=] { return nn::sq_mean(a, 0.4); }, {a}});
  }
  {
    auto x = leaf({1, 2, 8, 8});
    cases.push_back({"bicubic x4", [=] { return project(imaging::bicubic_resize(x, imaging::kUpsample4), 16); }, {x}});
    auto y = leaf({1, 2, 16, 16});
    cases.push_back({"bicubic x1/4", [=] { return project(imaging::bicubic_resize(y, imaging::kDownsample4), 17); }, {y}});
    cases.push_back({"high_pass box5", [=] { return project(imaging::high_pass(y, imaging::averaging_filter()), 18); }, {y}});
    cases.push_back({"low_pass gauss7", [=] { return project(imaging::low_pass(y, imaging::wald_blur()), 19); }, {y}});
  }
  {
    auto a = positive({1, 2, 8, 8}), b = positive({1, 2, 8, 8});
    cases.push_back({"q_index_map", [=] { return project(metrics::q_index_map(a, b, 4), 20); }, {a, b}});
    auto pan = textured_image<double>(Shape{1, 1, 16, 16}, rng);
    auto lrms = textured_image<double>(Shape{1, 4, 4, 4}, rng);
    auto fused = textured_image<double>(Shape{1, 4, 16, 16}, rng);
    fused.set_requires_grad(true);
    auto pan_lr = imaging::degrade(pan);
    cases.push_back({"qnr_tensor", [=] { return nn::mean(metrics::qnr_tensor(fused, lrms, pan, pan_lr)); }, {fused}});
  }

  double worst_primitive = 0.0;
  std::string worst_name;
  for (auto& c : cases) {
    const double e = fd_relative_error(c.loss, c.leaves);
    if (e > worst_primitive) {
      worst_primitive = e;
      worst_name = c.name;
    }
    if (!(e < 1e-4)) o.require(false, c.name + " relative error " + fmt("%.3g", e));
  }
  o.require(worst_primitive < 1e-4, std::to_string(cases.size()) + " primitives, worst " + worst_name + " " +
                                        fmt("%.3g", worst_primitive) + " < 1e-4");

  double worst_composite = 0.0;
  for (const auto& e : train::loss_gradient_suite(0)) {
    worst_composite = std::max(worst_composite, e.relative_error);
    if (!(e.relative_error < 1e-3)) o.require(false, e.name + " relative error " + fmt("%.3g", e.relative_error));
  }
  o.require(worst_composite < 1e-3, "composite loss terms through the generator, worst " +
                                        fmt("%.3g", worst_composite) + " < 1e-3");
  const double secs = seconds_since(t0);
  o.require(secs < 120.0, "runtime " + fmt("%.1f", secs) + " s < 120 s");
  return o;
}

// ---- criterion 2 -------------------------------------------------------------

Outcome criterion_metrics() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(200);
  double worst = 0.0;
  int instances = 0;
  for (std::size_t side : {32u, 64u}) {
    for (int k = 0; k < 25; ++k, ++instances) {
      auto ref = textured_image<double>(Shape{1, 4, side, side}, rng);
      auto fused = textured_image<double>(Shape{1, 4, side, side}, rng);
      auto pan = textured_image<double>(Shape{1, 1, side, side}, rng);
      auto lrms = textured_image<double>(Shape{1, 4, side / 4, side / 4}, rng);
      auto pan_lr = imaging::degrade(pan);
      const auto q = metrics::qnr(fused, lrms, pan, pan_lr);
      const double diffs[] = {
          metrics::sam(ref, fused) - oracle::sam(ref, fused),
          metrics::ergas(ref, fused) - oracle::ergas(ref, fused),
          metrics::ssim(ref, fused, 2047.0) - oracle::ssim(ref, fused, 2047.0),
          q.d_lambda - oracle::d_lambda(fused, lrms),
          q.d_s - oracle::d_s(fused, lrms, pan, pan_lr),
          q.qnr - oracle::qnr(fused, lrms, pan, pan_lr),
      };
      for (double d : diffs) worst = std::max(worst, std::abs(d));
    }
  }
  o.require(instances >= 50 && worst < 1e-9, std::to_string(instances) +
                                                 " random instances, worst oracle disagreement " + fmt("%.3g", worst));

  auto x = textured_image<double>(Shape{1, 4, 64, 64}, rng);
  o.require(metrics::sam(x, x) == 0.0, "SAM(x, x) = 0");
  o.require(metrics::ergas(x, x) == 0.0, "ERGAS(x, x) = 0");
  o.require(std::abs(metrics::ssim(x, x, 2047.0) - 1.0) < 1e-12, "SSIM(x, x) = 1");

  // Every fused band equal to the PAN and every LR band equal to the degraded
  // PAN: all Q values are 1, so D_lambda = D_s = 0.
  auto pan = textured_image<double>(Shape{1, 1, 64, 64}, rng);
  auto pan_lr = imaging::degrade(pan);
  auto fused = imaging::replicate_pan(pan);
  auto lrms = imaging::replicate_pan(pan_lr);
  const auto q = metrics::qnr(fused, lrms, pan, pan_lr);
  o.require(std::abs(q.d_lambda) < 1e-12 && std::abs(q.d_s) < 1e-12 && std::abs(q.qnr - 1.0) < 1e-12,
            "QNR = 1 when D_lambda = D_s = 0 (got " + fmt("%.15g", q.qnr) + ")");
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s < 60 s");
  return o;
}

// ---- criterion 3 -------------------------------------------------------------

Outcome criterion_identity_start() {
  Outcome o;
  std::mt19937_64 rng(300);
  for (auto kind : {net::BlockKind::rca, net::BlockKind::residual}) {
    net::GeneratorConfig cfg;
    cfg.block = kind;
    net::Generator<float> g(cfg);
    auto pan = textured_image<float>(Shape{2, 1, 64, 64}, rng);
    auto lrms = textured_image<float>(Shape{2, 4, 16, 16}, rng);
    const auto out = g(pan, lrms);
    const auto up = imaging::bicubic_resize(lrms, imaging::kUpsample4);
    bool same = out.shape() == up.shape();
    for (std::size_t i = 0; same && i < out.numel(); ++i) same = out.data()[i] == up.data()[i];
    o.require(same, "zero-init " + net::to_string(kind) + " generator output is bit-identical to bicubic x4 (float)");
  }

  net::GeneratorConfig cfg;
  net::Generator<double> g(cfg);
  auto pan = textured_image<double>(Shape{2, 1, 64, 64}, rng);
  auto lrms = textured_image<double>(Shape{2, 4, 16, 16}, rng);
  const auto filter = imaging::averaging_filter();
  const losses::FuseFn<double> fuse = [&](const Tensor<double>& p, const Tensor<double>& m) { return g(p, m); };
  const auto pass = losses::cycle_pass(fuse, pan, lrms);

  const auto up = imaging::bicubic_resize(lrms, imaging::kUpsample4);
  const auto up_down = imaging::bicubic_resize(up, imaging::kDownsample4);
  const auto up_down_up = imaging::bicubic_resize(up_down, imaging::kUpsample4);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); };

  const double cyc = losses::cycle_loss(pass).item();
  const double cyc_ref = nn::l1_mean(up, up_down_up).item();
  o.require(rel(cyc, cyc_ref) < 1e-6, "cycle loss " + fmt("%.9g", cyc) + " vs l1(up, up(down(up))) " +
                                          fmt("%.9g", cyc_ref));
  const double spa = losses::spatial_loss(pan, pass.f1, filter).item();
  const double spa_ref =
      nn::l1_mean(imaging::high_pass(pan, filter), nn::channel_max(imaging::high_pass(up, filter))).item();
  o.require(rel(spa, spa_ref) < 1e-6, "spatial loss " + fmt("%.9g", spa) + " vs composition " + fmt("%.9g", spa_ref));
  const double spe = losses::spectral_loss(lrms, pass.f1, filter).item();
  const double spe_ref = nn::l1_mean(imaging::low_pass(lrms, filter), imaging::low_pass(up_down, filter)).item();
  o.require(rel(spe, spe_ref) < 1e-6, "spectral loss " + fmt("%.9g", spe) + " vs composition " + fmt("%.9g", spe_ref));
  return o;
}

// ---- criteria 4 and 5 (shared training runs) -----------------------------------

struct DeskData {
  std::vector<data::ScenePair> with_reference;
  std::vector<data::ScenePair> training;  // references stripped
};

DeskData desk_data() {
  DeskData d;
  d.with_reference = data::synth_dataset(64, 64, 0, 11);
  d.training = d.with_reference;
  for (auto& p : d.training) p.reference.reset();
  return d;
}

train::TrainConfig desk_config() {
  train::TrainConfig c;  // batch 8, lr 1e-4, Adam(0.5, 0.999), default weights and labels
  c.max_iterations = 200;
  c.seed = 0;
  return c;
}

struct DeskRun {
  train::TrainResult result;
  double seconds = 0.0;
  bool finite = true;
};

DeskRun desk_run(const train::TrainConfig& config, const DeskData& data) {
  DeskRun r;
  const auto t0 = Clock::now();
  r.result = train::train(config, data.training);
  r.seconds = seconds_since(t0);
  for (const auto& l : r.result.log) {
    for (const auto& v : {l.cyc, l.adv, l.rec, l.nrf, l.d_loss})
      if (v && !std::isfinite(*v)) r.finite = false;
    if (!std::isfinite(l.g_total)) r.finite = false;
  }
  return r;
}

double mean_sam(const train::FuseMethod& fuse, const std::vector<data::ScenePair>& pairs) {
  const auto report = train::evaluate("m", fuse, pairs, data::Mode::wald);
  double s = 0.0;
  for (const auto& p : report.pairs) s += *p.sam_deg;
  return s / static_cast<double>(report.pairs.size());
}

Outcome criterion_desk_training(const DeskRun& run, const DeskData& data, std::size_t holdout) {
  Outcome o;
  o.require(run.finite, "no NaN or infinite loss in " + std::to_string(run.result.log.size()) + " iterations");
  const double q0 = run.result.initial_qnr(), q1 = run.result.final_qnr();
  o.require(q1 > q0, "held-out QNR " + fmt("%.6f", q0) + " at step 0 -> " + fmt("%.6f", q1));

  const std::vector<data::ScenePair> held(data.with_reference.end() - static_cast<long>(holdout),
                                          data.with_reference.end());
  const double sam_g = mean_sam(train::generator_method(run.result.generator), held);
  const double sam_b = mean_sam(train::bicubic_method(), held);
  o.require(sam_g < sam_b, "Wald-mode SAM vs hidden HR reference on held-out pairs: generator " + fmt("%.6f", sam_g) +
                               " deg, bicubic " + fmt("%.6f", sam_b) + " deg");
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  o.require(run.seconds < 600.0, "runtime " + fmt("%.1f", run.seconds) + " s < 600 s (" + std::to_string(cores) +
                                     " core(s) available)");
  return o;
}

// Generator gradient of the weighted total for one batch, flattened.
std::vector<float> generator_gradient(net::Generator<float>& g, const net::Discriminator<float>& d,
                                      const train::Batch& batch, const losses::LossWeights& w) {
  g.params().zero_grad();
  const losses::FuseFn<float> fuse = [&](const Tensor<float>& p, const Tensor<float>& m) { return g(p, m); };
  const auto pass = losses::cycle_pass(fuse, batch.pan, batch.lrms);
  const auto terms = train::generator_terms(pass, batch, d, w, losses::Pooling::max);
  nn::backward(losses::total_g_loss(w, terms));
  std::vector<float> out;
  for (auto& p : g.params()) {
    if (!p.tensor.has_grad()) {
      out.insert(out.end(), p.tensor.numel(), 0.0f);
      continue;
    }
    const auto gr = p.tensor.grad();
    out.insert(out.end(), gr.begin(), gr.end());
  }
  return out;
}

Outcome criterion_ablation(const DeskRun& all_terms, const DeskData& data) {
  Outcome o;

  // Every grid entry goes through the JSON config path and trains for one iteration.
  {
    auto small = data::synth_dataset(6, 32, 500, 11);
    for (auto& p : small) p.reference.reset();
    std::size_t launched = 0, total = 0;
    auto launch = [&](const std::vector<train::NamedWeights>& grid) {
      for (const auto& entry : grid) {
        ++total;
        guarded(o, "launch " + entry.name, [&] {
          train::TrainConfig c;
          c.loss_weights = entry.weights;
          c.batch_size = 2;
          c.holdout = 2;
          c.max_iterations = 1;
          const auto cfg = train::TrainConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
          const auto r = train::train(cfg, small);
          if (r.log.size() == 1 && std::isfinite(r.log[0].g_total)) ++launched;
        });
      }
    };
    const auto ablation = train::loss_ablation_grid();
    const auto sweep = train::weight_sweep_grid();
    launch(ablation);
    launch(sweep);
    o.require(ablation.size() == 8 && sweep.size() == 9 && launched == total,
              std::to_string(launched) + "/" + std::to_string(total) +
                  " configurations launched (8 loss-term variants, 9 lambda settings)");
  }

  // Per-term backward isolation on one batch with a random-output generator.
  {
    train::TrainConfig cfg;
    net::GeneratorConfig gc;
    gc.zero_init_output = false;
    gc.seed = 9;
    net::Generator<float> g(gc);
    const auto d = train::make_discriminator(cfg);
    std::vector<const data::ScenePair*> items = {&data.training[0], &data.training[1]};
    const auto batch = train::make_batch(items);

    bool isolated = true, effective = true;
    for (auto off : losses::kAllTerms) {
      losses::LossWeights w;
      w.set_enabled(off, false);
      const auto without = generator_gradient(g, d, batch, w);
      w.set_weight(off, 1e6);
      const auto heavy = generator_gradient(g, d, batch, w);
      isolated = isolated && without == heavy;

      losses::LossWeights only;
      for (auto t : losses::kAllTerms) only.set_enabled(t, t == off);
      const auto own = generator_gradient(g, d, batch, only);
      double norm = 0.0;
      for (float v : own) norm += double(v) * v;
      effective = effective && norm > 0.0;
    }
    o.require(isolated, "a disabled term leaves the generator gradient bit-identical even at weight 1e6");
    o.require(effective, "each term alone produces a nonzero generator gradient");
  }

  // Ordering: all terms vs each single-term run, 200 iterations, same seed.
  const double q_all = all_terms.result.final_qnr();
  for (auto t : losses::kAllTerms) {
    auto cfg = desk_config();
    for (auto u : losses::kAllTerms) cfg.loss_weights.set_enabled(u, u == t);
    guarded(o, "only_" + losses::to_string(t), [&] {
      const auto run = desk_run(cfg, data);
      const double q = run.result.final_qnr();
      o.require(q_all >= q, "QNR all terms " + fmt("%.6f", q_all) + " >= only_" + losses::to_string(t) + " " +
                                fmt("%.6f", q) + " (" + fmt("%.0f", run.seconds) + " s)");
    });
  }
  return o;
}

// ---- criterion 6 -------------------------------------------------------------

Outcome criterion_io(const fs::path& dir) {
  Outcome o;
  std::mt19937_64 rng(600);
  bool round_trip = true;
  for (std::uint16_t depth : {8, 10, 11, 12, 16}) {
    imaging::RasterImage img(37, 23, 4, depth);
    std::uniform_int_distribution<int> dist(0, (1 << depth) - 1);
    for (auto& v : img.pixels) v = static_cast<std::uint16_t>(dist(rng));
    img.pixels[0] = img.max_value();
    img.pixels[1] = 0;
    const auto path = dir / ("rt_" + std::to_string(depth) + ".msr");
    imaging::save_raster(img, path);
    const auto back = imaging::load_raster(path);
    const auto path2 = dir / ("rt2_" + std::to_string(depth) + ".msr");
    imaging::save_raster(back, path2);
    round_trip = round_trip && back == img && slurp(path) == slurp(path2);
  }
  o.require(round_trip, "MSR round trip bit-identical at 8, 10, 11, 12 and 16 bits");

  int rejected = 0;
  {
    imaging::RasterImage img(4, 4, 1, 10);
    img.pixels[5] = 1024;
    try {
      imaging::save_raster(img, dir / "over.msr");
    } catch (const ValidationError&) {
      ++rejected;
    }
  }
  {
    imaging::RasterImage img(4, 4, 1, 10);
    imaging::save_raster(img, dir / "ok.msr");
    auto bytes = slurp(dir / "ok.msr");
    std::ofstream(dir / "patched.msr", std::ios::binary) << bytes;
    // Raise the last pixel above 2^10 - 1 directly in the file.
    std::fstream f(dir / "patched.msr", std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(static_cast<std::streamoff>(bytes.size() - 2));
    const unsigned char over[2] = {0x00, 0x04};
    f.write(reinterpret_cast<const char*>(over), 2);
    f.close();
    try {
      imaging::load_raster(dir / "patched.msr");
    } catch (const ValidationError&) {
      ++rejected;
    }
  }
  {
    imaging::RasterImage img(4, 4, 1, 10);
    img.bit_depth = 17;
    try {
      img.validate();
    } catch (const ValidationError&) {
      ++rejected;
    }
  }
  o.require(rejected == 3, "bit-depth bounds enforced on write, on read and on the depth itself (" +
                               std::to_string(rejected) + "/3 rejected)");

  net::GeneratorConfig gc;
  gc.zero_init_output = false;
  gc.seed = 61;
  net::Generator<float> g(gc);
  net::Discriminator<float> d;
  const auto ckpt = dir / "g.ucgk";
  net::save_checkpoint(ckpt, {&g.params(), &d.params()});
  const auto g2 = net::load_generator(ckpt);
  net::Discriminator<float> d2(net::DiscriminatorConfig{1234});
  net::load_parameters(d2.params(), net::read_checkpoint(ckpt));
  auto pan = textured_image<float>(Shape{1, 1, 64, 64}, rng);
  auto lrms = textured_image<float>(Shape{1, 4, 16, 16}, rng);
  const auto a = g(pan, lrms), b = g2(pan, lrms);
  const auto da = d(pan, lrms, a), db = d2(pan, lrms, b);
  bool exact = true;
  for (std::size_t i = 0; i < a.numel(); ++i) exact = exact && a.data()[i] == b.data()[i];
  for (std::size_t i = 0; i < da.numel(); ++i) exact = exact && da.data()[i] == db.data()[i];
  o.require(exact, "checkpoint reload reproduces generator and discriminator outputs bit-exactly");
  return o;
}

// ---- criterion 7 -------------------------------------------------------------

Outcome criterion_determinism(const DeskData& data, const fs::path& dir) {
  Outcome o;
  auto cfg = desk_config();
  cfg.max_iterations = 10;
  cfg.checkpoint_every = 5;
  std::vector<fs::path> runs = {dir / "run_a", dir / "run_b"};
  for (const auto& r : runs) {
    fs::remove_all(r);
    fs::create_directories(r);
    train::TrainOutputs out;
    out.log_path = r / "train_log.jsonl";
    out.checkpoint_dir = r / "checkpoints";
    train::train(cfg, data.training, out);
  }
  const auto log_a = slurp(runs[0] / "train_log.jsonl");
  o.require(!log_a.empty() && log_a == slurp(runs[1] / "train_log.jsonl"), "identical train logs");
  bool same = true;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(runs[0] / "checkpoints")) {
    ++files;
    same = same && slurp(e.path()) == slurp(runs[1] / "checkpoints" / e.path().filename());
  }
  o.require(same && files == 3, std::to_string(files) + " checkpoints byte-identical across the two runs");
  return o;
}

}  // namespace

// Optional arguments select criteria by number; all run by default.
int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  auto want = [&](int id) { return selected.empty() || std::find(selected.begin(), selected.end(), id) != selected.end(); };

  const auto dir = fs::temp_directory_path() / "ucgan_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto run = [&](int id, const std::string& title, const std::function<Outcome()>& f) {
    if (!want(id)) return;
    Outcome o;
    guarded(o, title, [&] { o = f(); });
    report(id, title, o);
  };

  run(1, "gradient suite", criterion_gradients);
  run(2, "metric oracles and ideal values", criterion_metrics);
  run(3, "identity start and step-0 losses", criterion_identity_start);

  const auto data = desk_data();
  std::optional<DeskRun> all_terms;
  std::string desk_error = "not run";
  if (want(4) || want(5)) {
    try {
      all_terms = desk_run(desk_config(), data);
    } catch (const std::exception& e) {
      desk_error = e.what();
    }
  }
  auto all_terms_run = [&]() -> const DeskRun& {
    if (!all_terms) throw Error("all-terms training run failed: " + desk_error);
    return *all_terms;
  };
  run(4, "desk training (64 scenes, PAN 64x64, 200 iterations)",
      [&] { return criterion_desk_training(all_terms_run(), data, desk_config().holdout); });
  run(5, "ablation structure and ordering", [&] { return criterion_ablation(all_terms_run(), data); });
  run(6, "MSR and checkpoint round trips", [&] { return criterion_io(dir); });
  run(7, "determinism of train", [&] { return criterion_determinism(data, dir); });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
