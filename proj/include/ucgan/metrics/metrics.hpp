#pragma once

#include "ucgan/nn/tensor.hpp"

// Image quality metrics. Inputs are single-sample tensors (1, C, H, W) of raw
// digital numbers; statistics are accumulated in double precision.
namespace ucgan::metrics {

/// Mean spectral angle in degrees. Pixels where either spectrum is the zero
/// vector contribute an angle of 0 and still count in the mean.
template <typename T>
double sam(const nn::Tensor<T>& reference, const nn::Tensor<T>& fused);

/// 100 * ratio * sqrt(mean_b (RMSE_b / mean_b)^2), ratio = high/low resolution = 1/4.
template <typename T>
double ergas(const nn::Tensor<T>& reference, const nn::Tensor<T>& fused, double ratio = 0.25);

/// Per-band SSIM with an 11x11 Gaussian window (sigma 1.5) over valid
/// positions, C1 = (0.01 L)^2, C2 = (0.03 L)^2, averaged over bands.
template <typename T>
double ssim(const nn::Tensor<T>& reference, const nn::Tensor<T>& fused, double dynamic_range);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

struct QnrParams {
  /// Side of the non-overlapping Q-index blocks. Images smaller than the
  /// block use a single block clipped to min(H, W).
  int block = 32;
};

/// Universal image quality index of two single-band images (1, 1, H, W),
/// averaged over non-overlapping block x block windows (remainders dropped).
/// Windows where both the variance sum and the squared-mean sum vanish are
/// skipped; if the variance sum alone vanishes the luminance term 2xy/(x^2+y^2)
/// is used, if the mean sum alone vanishes the contrast-structure term
/// 2 s_xy/(s_x^2+s_y^2). Throws DegenerateInputError when every window is skipped.
template <typename T>
double q_index(const nn::Tensor<T>& x, const nn::Tensor<T>& y, int block = 32);

struct QnrResult {
  double d_lambda = 0.0;
  double d_s = 0.0;
  double qnr = 0.0;
};

/// Spectral distortion: mean over ordered band pairs i != j of
/// |Q(f_i, f_j) - Q(m_i, m_j)|, p = 1.
template <typename T>
double d_lambda(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const QnrParams& params = {});

/// Spatial distortion: mean over bands of |Q(f_i, pan) - Q(m_i, pan_lr)|, q = 1.
template <typename T>
double d_s(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const nn::Tensor<T>& pan,
           const nn::Tensor<T>& pan_lr, const QnrParams& params = {});

/// (1 - D_lambda)(1 - D_s). When `pan_lr` is undefined it is produced by the
/// Wald degradation (Gaussian blur, bicubic x1/4) of `pan` without rounding.
template <typename T>
QnrResult qnr(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const nn::Tensor<T>& pan,
              const nn::Tensor<T>& pan_lr = {}, const QnrParams& params = {});

int effective_block(int block, std::size_t height, std::size_t width);

// ---- differentiable path -------------------------------------------------

/// Q-index of every (sample, channel) plane pair: a, b (N, C, H, W) -> (N, C, 1, 1).
/// Differentiable with respect to both inputs; `block` is clipped like QnrParams.
template <typename T>
nn::Tensor<T> q_index_map(const nn::Tensor<T>& a, const nn::Tensor<T>& b, int block);

/// Per-sample QNR (N, 1, 1, 1), differentiable with respect to `fused`. The
/// low-resolution terms (lrms, pan_lr) are treated as constants.
template <typename T>
nn::Tensor<T> qnr_tensor(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms,
                         const nn::Tensor<T>& pan, const nn::Tensor<T>& pan_lr,
                         const QnrParams& params = {});

}  // namespace ucgan::metrics
