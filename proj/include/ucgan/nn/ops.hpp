#pragma once

#include <vector>

#include "ucgan/nn/tensor.hpp"

// Differentiable primitives. All functions are explicitly instantiated for
// float (training) and double (gradient checking).
namespace ucgan::nn {

/// 2-D cross-correlation with zero padding. weight is (Cout, Cin, k, k); bias
/// holds Cout values in any 4-D layout and may be undefined.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int stride, int padding);

/// Per (sample, channel) normalization without affine parameters.
template <typename T>
Tensor<T> instance_norm(const Tensor<T>& input, T eps = T(1e-5));

template <typename T>
Tensor<T> relu(const Tensor<T>& input);
template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& input, T slope = T(0.2));
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& input);
template <typename T>
Tensor<T> abs(const Tensor<T>& input);

/// (N, C, 1, 1) channel means.
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& input);

/// (N, 1, H, W) per-pixel maximum over channels. The gradient goes to the
/// first channel attaining the maximum.
template <typename T>
Tensor<T> channel_max(const Tensor<T>& input);

/// (N, 1, H, W) per-pixel mean over channels.
template <typename T>
Tensor<T> channel_mean(const Tensor<T>& input);

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

/// Picks channels by index (repeats allowed): out[:, i] = input[:, index[i]].
template <typename T>
Tensor<T> gather_channels(const Tensor<T>& input, const std::vector<int>& index);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T value);

/// x (N, C, H, W) times s (N, C, 1, 1) broadcast over the plane.
template <typename T>
Tensor<T> mul_channelwise(const Tensor<T>& x, const Tensor<T>& s);

/// Scalar reductions, shape (1, 1, 1, 1).
template <typename T>
Tensor<T> sum(const Tensor<T>& a);
template <typename T>
Tensor<T> mean(const Tensor<T>& a);
/// mean |a - b|
template <typename T>
Tensor<T> l1_mean(const Tensor<T>& a, const Tensor<T>& b);
/// mean (a - target)^2
template <typename T>
Tensor<T> sq_mean(const Tensor<T>& a, T target);

/// Stacks same-shaped single-sample tensors along the batch axis. Not differentiable.
template <typename T>
Tensor<T> stack_batch(const std::vector<Tensor<T>>& items);

/// Extracts sample `index` as a (1, C, H, W) tensor. Not differentiable.
template <typename T>
Tensor<T> batch_item(const Tensor<T>& batch, std::size_t index);

}  // namespace ucgan::nn
