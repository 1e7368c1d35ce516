#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ucgan/nn/tensor.hpp"

namespace ucgan::nn {

struct GradCheckOptions {
  double step = 1e-3;
  /// Coordinates probed per leaf; 0 probes every coordinate.
  std::size_t max_coords_per_leaf = 0;
  std::uint64_t seed = 0;
};

struct LeafCheck {
  std::string name;
  std::size_t coords = 0;
  double max_abs_error = 0.0;
  /// ||analytic - numeric||_inf / max(||analytic||_inf, ||numeric||_inf) over probed coords.
  double relative_error = 0.0;
  /// max(||analytic||_inf, ||numeric||_inf) over probed coords.
  double scale = 0.0;
};

struct GradCheckReport {
  std::vector<LeafCheck> leaves;
  double worst_relative_error() const;
  /// Relative error of all probed coordinates taken as one vector. Leaves whose
  /// gradient is structurally zero (a bias feeding instance norm) do not dominate it.
  double global_relative_error() const;
};

/// Compares backward() against central finite differences. `loss` must rebuild
/// the graph from the current values of `leaves` on every call.
GradCheckReport check_gradient(const std::function<Tensor<double>()>& loss,
                               std::vector<std::pair<std::string, Tensor<double>>> leaves,
                               const GradCheckOptions& options = {});

}  // namespace ucgan::nn
