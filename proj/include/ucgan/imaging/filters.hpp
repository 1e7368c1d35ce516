#pragma once

#include <cstdint>
#include <vector>

#include "ucgan/nn/tensor.hpp"

namespace ucgan::imaging {

struct AxisTap {
  std::uint32_t index;
  double weight;
};

/// Sparse 1-D linear map along one image axis: out[i] = (sum_k w_k * in[idx_k]) / divisor.
struct AxisOperator {
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  double divisor = 1.0;
  std::vector<std::vector<AxisTap>> taps;  // one list per output index
};

/// Applies `horizontal` along width, then `vertical` along height, to every
/// (sample, channel) plane. Differentiable; the backward pass is the transpose.
template <typename T>
nn::Tensor<T> apply_separable(const nn::Tensor<T>& x, const AxisOperator& vertical,
                              const AxisOperator& horizontal);

enum class FilterKind { box, gaussian };

struct FilterSpec {
  FilterKind kind = FilterKind::box;
  int size = 5;
  double sigma = 0.0;

  static FilterSpec box(int size) { return {FilterKind::box, size, 0.0}; }
  static FilterSpec gaussian(int size, double sigma) { return {FilterKind::gaussian, size, sigma}; }

  /// Throws ContractError unless size is odd and >= 3 (and sigma > 0 for gaussian).
  void validate() const;
  /// Normalized 1-D weights; the 2-D kernel is their outer product.
  std::vector<double> weights_1d() const;

  bool operator==(const FilterSpec&) const = default;
};

/// Averaging filter used for the high-pass/low-pass split of the network inputs and losses.
inline FilterSpec averaging_filter() { return FilterSpec::box(5); }
/// Anti-alias blur applied before the x4 decimation of the Wald protocol.
inline FilterSpec wald_blur() { return FilterSpec::gaussian(7, 2.0); }

/// Same-size smoothing operator with clamp-to-edge sampling.
AxisOperator smoothing_operator(const FilterSpec& spec, std::size_t length);

template <typename T>
nn::Tensor<T> low_pass(const nn::Tensor<T>& img, const FilterSpec& spec);

/// img - low_pass(img, spec)
template <typename T>
nn::Tensor<T> high_pass(const nn::Tensor<T>& img, const FilterSpec& spec);

}  // namespace ucgan::imaging
