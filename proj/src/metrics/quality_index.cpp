#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ucgan/imaging/resample.hpp"
#include "ucgan/metrics/metrics.hpp"
#include "ucgan/nn/ops.hpp"

namespace ucgan::metrics {

namespace {

enum class QBranch { full, luminance, contrast, skipped };

struct BlockStats {
  double mx = 0, my = 0, vx = 0, vy = 0, cxy = 0;
  QBranch branch = QBranch::skipped;
  double q = 0;
};

template <typename T>
BlockStats block_stats(const T* x, const T* y, std::size_t stride, std::size_t y0, std::size_t x0,
                       std::size_t b) {
  BlockStats s;
  const double n = static_cast<double>(b * b);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < b; ++c) {
      s.mx += x[(y0 + r) * stride + x0 + c];
      s.my += y[(y0 + r) * stride + x0 + c];
    }
  s.mx /= n;
  s.my /= n;
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < b; ++c) {
      const double dx = x[(y0 + r) * stride + x0 + c] - s.mx;
      const double dy = y[(y0 + r) * stride + x0 + c] - s.my;
      s.vx += dx * dx;
      s.vy += dy * dy;
      s.cxy += dx * dy;
    }
  s.vx /= n;
  s.vy /= n;
  s.cxy /= n;
  const double var_sum = s.vx + s.vy;
  const double mean_sq = s.mx * s.mx + s.my * s.my;
  if (var_sum == 0.0 && mean_sq == 0.0) {
    s.branch = QBranch::skipped;
  } else if (var_sum == 0.0) {
    s.branch = QBranch::luminance;
    s.q = 2.0 * s.mx * s.my / mean_sq;
  } else if (mean_sq == 0.0) {
    s.branch = QBranch::contrast;
    s.q = 2.0 * s.cxy / var_sum;
  } else {
    s.branch = QBranch::full;
    s.q = 4.0 * s.cxy * s.mx * s.my / (var_sum * mean_sq);
  }
  return s;
}

// Q of one plane pair and, optionally, dQ/dx and dQ/dy accumulated with weight `upstream`.
template <typename T>
double plane_q(const T* x, const T* y, std::size_t h, std::size_t w, int block, double upstream,
               T* gx, T* gy) {
  const auto b = static_cast<std::size_t>(block);
  std::vector<BlockStats> stats;
  std::vector<std::pair<std::size_t, std::size_t>> origin;
  for (std::size_t by = 0; by + b <= h; by += b)
    for (std::size_t bx = 0; bx + b <= w; bx += b) {
      stats.push_back(block_stats(x, y, w, by, bx, b));
      origin.emplace_back(by, bx);
    }
  std::size_t valid = 0;
  double total = 0.0;
  for (const auto& s : stats)
    if (s.branch != QBranch::skipped) {
      ++valid;
      total += s.q;
    }
  if (valid == 0) throw DegenerateInputError("q_index: every window is constant zero");
  if (gx == nullptr && gy == nullptr) return total / static_cast<double>(valid);

  const double n = static_cast<double>(b * b);
  const double scale = upstream / static_cast<double>(valid);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& s = stats[k];
    if (s.branch == QBranch::skipped) continue;
    const double var_sum = s.vx + s.vy;
    const double mean_sq = s.mx * s.mx + s.my * s.my;
    const auto [by, bx] = origin[k];
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < b; ++c) {
        const std::size_t i = (by + r) * w + bx + c;
        const double dx = x[i] - s.mx, dy = y[i] - s.my;
        double qx = 0.0, qy = 0.0;
        switch (s.branch) {
          case QBranch::full: {
            const double denom = var_sum * mean_sq;
            qx = 4.0 * s.my * (dy * s.mx + s.cxy) / (n * denom) -
                 s.q * (2.0 * dx / (n * var_sum) + 2.0 * s.mx / (n * mean_sq));
            qy = 4.0 * s.mx * (dx * s.my + s.cxy) / (n * denom) -
                 s.q * (2.0 * dy / (n * var_sum) + 2.0 * s.my / (n * mean_sq));
            break;
          }
          case QBranch::luminance:
            qx = (2.0 * s.my / n - s.q * 2.0 * s.mx / n) / mean_sq;
            qy = (2.0 * s.mx / n - s.q * 2.0 * s.my / n) / mean_sq;
            break;
          case QBranch::contrast:
            qx = (2.0 * dy / n - s.q * 2.0 * dx / n) / var_sum;
            qy = (2.0 * dx / n - s.q * 2.0 * dy / n) / var_sum;
            break;
          case QBranch::skipped:
            break;
        }
        if (gx) gx[i] += static_cast<T>(scale * qx);
        if (gy) gy[i] += static_cast<T>(scale * qy);
      }
  }
  return total / static_cast<double>(valid);
}

template <typename T>
void require_single(const char* name, const nn::Tensor<T>& t, std::size_t channels) {
  if (t.shape().n != 1) throw DimensionError(std::string(name) + ": expected one sample (axis 0 = 1), got " + t.shape().str());
  if (channels != 0 && t.shape().c != channels) {
    throw DimensionError(std::string(name) + ": expected " + std::to_string(channels) +
                         " channels (axis 1), got " + t.shape().str());
  }
}

template <typename T>
const T* plane_ptr(const nn::Tensor<T>& t, std::size_t c) {
  return t.data().data() + c * t.shape().plane();
}

}  // namespace

int effective_block(int block, std::size_t height, std::size_t width) {
  if (block < 1) throw ContractError("q_index: block must be positive");
  return static_cast<int>(std::min<std::size_t>({static_cast<std::size_t>(block), height, width}));
}

template <typename T>
double q_index(const nn::Tensor<T>& x, const nn::Tensor<T>& y, int block) {
  require_single("q_index", x, 1);
  require_single("q_index", y, 1);
  if (x.shape() != y.shape()) throw DimensionError("q_index: shape mismatch " + x.shape().str() + " vs " + y.shape().str());
  const nn::Shape s = x.shape();
  if (block < 1 || s.h < static_cast<std::size_t>(block) || s.w < static_cast<std::size_t>(block)) {
    throw ContractError("q_index: image " + s.str() + " smaller than block " + std::to_string(block));
  }
  return plane_q<T>(x.data().data(), y.data().data(), s.h, s.w, block, 0.0, nullptr, nullptr);
}

template <typename T>
double d_lambda(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const QnrParams& params) {
  require_single("d_lambda", fused, 0);
  require_single("d_lambda", lrms, fused.shape().c);
  const nn::Shape sf = fused.shape(), sm = lrms.shape();
  const int bf = effective_block(params.block, sf.h, sf.w);
  const int bm = effective_block(params.block, sm.h, sm.w);
  const std::size_t bands = sf.c;
  if (bands < 2) throw ContractError("d_lambda: needs at least two bands");
  double acc = 0.0;
  for (std::size_t i = 0; i < bands; ++i)
    for (std::size_t j = 0; j < bands; ++j) {
      if (i == j) continue;
      const double qf = plane_q<T>(plane_ptr(fused, i), plane_ptr(fused, j), sf.h, sf.w, bf, 0.0, nullptr, nullptr);
      const double qm = plane_q<T>(plane_ptr(lrms, i), plane_ptr(lrms, j), sm.h, sm.w, bm, 0.0, nullptr, nullptr);
      acc += std::abs(qf - qm);
    }
  return acc / static_cast<double>(bands * (bands - 1));
}

template <typename T>
double d_s(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const nn::Tensor<T>& pan,
           const nn::Tensor<T>& pan_lr, const QnrParams& params) {
  require_single("d_s", fused, 0);
  require_single("d_s", lrms, fused.shape().c);
  require_single("d_s", pan, 1);
  require_single("d_s", pan_lr, 1);
  const nn::Shape sf = fused.shape(), sm = lrms.shape();
  if (pan.shape().h != sf.h || pan.shape().w != sf.w) throw DimensionError("d_s: PAN and fused sizes differ");
  if (pan_lr.shape().h != sm.h || pan_lr.shape().w != sm.w) throw DimensionError("d_s: degraded PAN and LR MS sizes differ");
  const int bf = effective_block(params.block, sf.h, sf.w);
  const int bm = effective_block(params.block, sm.h, sm.w);
  double acc = 0.0;
  for (std::size_t i = 0; i < sf.c; ++i) {
    const double qf = plane_q<T>(plane_ptr(fused, i), pan.data().data(), sf.h, sf.w, bf, 0.0, nullptr, nullptr);
    const double qm = plane_q<T>(plane_ptr(lrms, i), pan_lr.data().data(), sm.h, sm.w, bm, 0.0, nullptr, nullptr);
    acc += std::abs(qf - qm);
  }
  return acc / static_cast<double>(sf.c);
}

template <typename T>
QnrResult qnr(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const nn::Tensor<T>& pan,
              const nn::Tensor<T>& pan_lr, const QnrParams& params) {
  nn::NoGradGuard no_grad;
  const nn::Tensor<T> pan_low = pan_lr.defined() ? pan_lr : imaging::degrade(pan);
  QnrResult r;
  r.d_lambda = d_lambda(fused, lrms, params);
  r.d_s = d_s(fused, lrms, pan, pan_low, params);
  r.qnr = (1.0 - r.d_lambda) * (1.0 - r.d_s);
  return r;
}

template <typename T>
nn::Tensor<T> q_index_map(const nn::Tensor<T>& a, const nn::Tensor<T>& b, int block) {
  if (a.shape() != b.shape()) throw DimensionError("q_index_map: shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  const nn::Shape s = a.shape();
  const int blk = effective_block(block, s.h, s.w);
  std::vector<T> out(s.n * s.c);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<T>(plane_q<T>(a.data().data() + k * s.plane(), b.data().data() + k * s.plane(), s.h,
                                       s.w, blk, 0.0, nullptr, nullptr));
  }
  return nn::Tensor<T>::from_op(nn::Shape{s.n, s.c, 1, 1}, std::move(out), {a, b},
                                [s, blk](nn::detail::Node<T>& self) {
                                  auto& pa = *self.parents[0];
                                  auto& pb = *self.parents[1];
                                  T* ga = pa.requires_grad ? pa.ensure_grad().data() : nullptr;
                                  T* gb = pb.requires_grad ? pb.ensure_grad().data() : nullptr;
                                  const std::size_t plane = s.plane();
                                  for (std::size_t k = 0; k < s.n * s.c; ++k) {
                                    plane_q<T>(pa.value.data() + k * plane, pb.value.data() + k * plane, s.h,
                                               s.w, blk, static_cast<double>(self.grad[k]),
                                               ga ? ga + k * plane : nullptr, gb ? gb + k * plane : nullptr);
                                  }
                                });
}

template <typename T>
nn::Tensor<T> qnr_tensor(const nn::Tensor<T>& fused, const nn::Tensor<T>& lrms, const nn::Tensor<T>& pan,
                         const nn::Tensor<T>& pan_lr, const QnrParams& params) {
  const nn::Shape sf = fused.shape();
  if (lrms.shape().n != sf.n || pan.shape().n != sf.n || pan_lr.shape().n != sf.n) {
    throw DimensionError("qnr_tensor: batch (axis 0) mismatch");
  }
  if (lrms.shape().c != sf.c) throw DimensionError("qnr_tensor: channels (axis 1) of fused and LR MS differ");
  if (pan.shape().c != 1 || pan_lr.shape().c != 1) throw DimensionError("qnr_tensor: PAN must have one channel (axis 1)");

  const int bands = static_cast<int>(sf.c);
  std::vector<int> first, second;
  for (int i = 0; i < bands; ++i)
    for (int j = 0; j < bands; ++j)
      if (i != j) {
        first.push_back(i);
        second.push_back(j);
      }
  const std::vector<int> pan_copies(static_cast<std::size_t>(bands), 0);

  nn::Tensor<T> q_ms_pairs, q_ms_pan;
  {
    nn::NoGradGuard no_grad;
    q_ms_pairs = q_index_map(nn::gather_channels(lrms, first), nn::gather_channels(lrms, second), params.block);
    q_ms_pan = q_index_map(lrms, nn::gather_channels(pan_lr, pan_copies), params.block);
  }
  const auto q_fused_pairs =
      q_index_map(nn::gather_channels(fused, first), nn::gather_channels(fused, second), params.block);
  const auto q_fused_pan = q_index_map(fused, nn::gather_channels(pan, pan_copies), params.block);

  const auto d_lambda = nn::channel_mean(nn::abs(nn::sub(q_fused_pairs, q_ms_pairs)));
  const auto d_s = nn::channel_mean(nn::abs(nn::sub(q_fused_pan, q_ms_pan)));
  return nn::mul(nn::add_scalar(nn::scale(d_lambda, T(-1)), T(1)), nn::add_scalar(nn::scale(d_s, T(-1)), T(1)));
}

#define UCGAN_INSTANTIATE_QI(T)                                                                       \
  template double q_index<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, int);                       \
  template double d_lambda<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, const QnrParams&);          \
  template double d_s<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, const nn::Tensor<T>&,            \
                         const nn::Tensor<T>&, const QnrParams&);                                     \
  template QnrResult qnr<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, const nn::Tensor<T>&,         \
                            const nn::Tensor<T>&, const QnrParams&);                                  \
  template nn::Tensor<T> q_index_map<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, int);            \
  template nn::Tensor<T> qnr_tensor<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, const nn::Tensor<T>&, \
                                       const nn::Tensor<T>&, const QnrParams&);

UCGAN_INSTANTIATE_QI(float)
UCGAN_INSTANTIATE_QI(double)

}  // namespace ucgan::metrics
