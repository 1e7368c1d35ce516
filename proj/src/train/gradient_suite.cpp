#include <random>

#include "ucgan/nn/gradcheck.hpp"
#include "ucgan/nn/ops.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/train/train.hpp"

namespace ucgan::train {

namespace {

using TensorD = nn::Tensor<double>;
using Leaves = std::vector<std::pair<std::string, TensorD>>;

constexpr std::size_t kToySide = 24;
constexpr std::size_t kToyFeatures = 8;

TensorD uniform(nn::Shape shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape.numel());
  for (auto& x : v) x = u(rng);
  return TensorD(shape, std::move(v));
}

Leaves leaves_of(nn::ParameterSet<double>& params) {
  Leaves out;
  for (auto& p : params) out.emplace_back(p.name, p.tensor);
  return out;
}

}  // namespace

std::vector<GradSuiteEntry> loss_gradient_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Digital-number scale keeps ReLU pre-activations well away from the kink
  // relative to the finite-difference step.
  const auto pan = uniform({1, 1, kToySide, kToySide}, rng, 100.0, 1000.0);
  const auto lrms = uniform({1, 4, kToySide / 4, kToySide / 4}, rng, 100.0, 1000.0);
  TensorD pan_lr;
  {
    nn::NoGradGuard no_grad;
    pan_lr = imaging::degrade(pan);
  }
  const auto filter = imaging::averaging_filter();

  nn::GradCheckOptions opt;
  opt.step = 1e-6;
  opt.max_coords_per_leaf = 2;
  opt.seed = seed;

  std::vector<GradSuiteEntry> out;
  for (auto kind : {net::BlockKind::rca, net::BlockKind::residual}) {
    net::GeneratorConfig gc;
    gc.block = kind;
    gc.features = kToyFeatures;
    gc.zero_init_output = false;
    gc.seed = seed + 10;
    net::Generator<double> g(gc);
    net::Discriminator<double> d(net::DiscriminatorConfig{seed + 11});
    const losses::FuseFn<double> fuse = [&g](const TensorD& p, const TensorD& l) { return g(p, l); };
    const losses::CriticFn<double> critic = [&d](const TensorD& p, const TensorD& l, const TensorD& f) {
      return d(p, l, f);
    };
    auto pass = [&] { return losses::cycle_pass(fuse, pan, lrms); };
    auto check = [&](const std::string& name, const std::function<TensorD()>& loss, Leaves leaves) {
      const auto rep = nn::check_gradient(loss, std::move(leaves), opt);
      out.push_back({name + "/" + net::to_string(kind), rep.global_relative_error()});
    };

    const auto g_leaves = leaves_of(g.params());
    if (kind == net::BlockKind::rca) {
      check("cycle", [&] { return losses::cycle_loss(pass()); }, g_leaves);
      check("adversarial_g", [&] { return losses::adv_loss_g(critic, pan, pass()); }, g_leaves);
      check("adversarial_d",
            [&] { return losses::adv_loss_d(critic, pan, lrms, pass(), losses::SoftLabels{0.9, 0.1}); },
            leaves_of(d.params()));
      check("spatial_max", [&] { return losses::spatial_loss(pan, g(pan, lrms), filter, losses::Pooling::max); },
            g_leaves);
      check("spatial_avg", [&] { return losses::spatial_loss(pan, g(pan, lrms), filter, losses::Pooling::avg); },
            g_leaves);
      check("spectral", [&] { return losses::spectral_loss(lrms, g(pan, lrms), filter); }, g_leaves);
      check("nrf", [&] { return losses::nrf_loss(pan, lrms, g(pan, lrms), pan_lr); }, g_leaves);
    }
    // Weights are raised so every term contributes visibly to the total.
    losses::LossWeights w;
    w.cyc = 0.5;
    w.adv = 0.5;
    w.rec = 0.5;
    w.nrf = 1.0;
    check("total", [&] {
      const auto p = pass();
      losses::LossComponents<double> c;
      c.cyc = losses::cycle_loss(p);
      c.adv = losses::adv_loss_g(critic, pan, p);
      c.rec = nn::add(losses::spatial_loss(pan, p.f1, filter, losses::Pooling::max),
                      losses::spectral_loss(lrms, p.f1, filter));
      c.nrf = losses::nrf_loss(pan, lrms, p.f1, pan_lr);
      return losses::total_g_loss(w, c);
    }, g_leaves);
  }
  return out;
}

}  // namespace ucgan::train
