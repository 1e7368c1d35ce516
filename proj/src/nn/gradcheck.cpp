#include "ucgan/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ucgan::nn {

double GradCheckReport::worst_relative_error() const {
  double worst = 0.0;
  for (const auto& l : leaves) worst = std::max(worst, l.relative_error);
  return worst;
}

double GradCheckReport::global_relative_error() const {
  double err = 0.0, scale = 0.0;
  for (const auto& l : leaves) {
    err = std::max(err, l.max_abs_error);
    scale = std::max(scale, l.scale);
  }
  return scale > 1e-12 ? err / scale : err;
}

GradCheckReport check_gradient(const std::function<Tensor<double>()>& loss,
                               std::vector<std::pair<std::string, Tensor<double>>> leaves,
                               const GradCheckOptions& options) {
  for (auto& [name, t] : leaves) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  backward(loss());

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  for (auto& [name, t] : leaves) {
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    std::vector<std::size_t> coords(t.numel());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_leaf != 0 && coords.size() > options.max_coords_per_leaf) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_leaf);
      std::sort(coords.begin(), coords.end());
    }

    LeafCheck check{name, coords.size(), 0.0, 0.0};
    double norm_a = 0.0, norm_n = 0.0;
    auto values = t.mutable_data();
    for (std::size_t i : coords) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const double up = loss().item();
      values[i] = saved - options.step;
      const double down = loss().item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      check.max_abs_error = std::max(check.max_abs_error, std::abs(numeric - analytic[i]));
      norm_a = std::max(norm_a, std::abs(analytic[i]));
      norm_n = std::max(norm_n, std::abs(numeric));
    }
    const double scale = std::max(norm_a, norm_n);
    check.scale = scale;
    check.relative_error = scale > 1e-12 ? check.max_abs_error / scale : check.max_abs_error;
    report.leaves.push_back(check);
  }
  return report;
}

}  // namespace ucgan::nn
