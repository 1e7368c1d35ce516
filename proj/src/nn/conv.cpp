#include <Eigen/Core>
#include <algorithm>
#include <string>

#include "ucgan/nn/ops.hpp"

namespace ucgan::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

struct ConvGeometry {
  std::size_t cin, h, w, cout, k, ho, wo;
  int stride, pad;
  std::size_t rows() const { return cin * k * k; }
  std::size_t cols() const { return ho * wo; }
};

// Output columns [lo, hi) whose input column ox*s - p + kx lies inside [0, w).
inline void valid_columns(const ConvGeometry& g, std::size_t kx, std::size_t& lo, std::size_t& hi) {
  const long off = static_cast<long>(kx) - g.pad;
  const long s = g.stride;
  const long first = off >= 0 ? 0 : (-off + s - 1) / s;
  const long last = (static_cast<long>(g.w) - 1 - off) < 0 ? -1 : (static_cast<long>(g.w) - 1 - off) / s;
  lo = static_cast<std::size_t>(std::min<long>(first, static_cast<long>(g.wo)));
  hi = static_cast<std::size_t>(std::clamp<long>(last + 1, static_cast<long>(lo), static_cast<long>(g.wo)));
}

// col[(ci*k + ky)*k + kx][oy*wo + ox] = x[ci][oy*s - p + ky][ox*s - p + kx], zero outside.
template <typename T>
void im2col(const T* x, const ConvGeometry& g, T* col) {
  const long h = static_cast<long>(g.h);
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    const T* plane = x + ci * g.h * g.w;
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        T* row = col + ((ci * g.k + ky) * g.k + kx) * g.cols();
        std::size_t lo, hi;
        valid_columns(g, kx, lo, hi);
        const long off = static_cast<long>(kx) - g.pad;
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const long iy = static_cast<long>(oy) * g.stride - g.pad + static_cast<long>(ky);
          T* dst = row + oy * g.wo;
          if (iy < 0 || iy >= h) {
            std::fill_n(dst, g.wo, T(0));
            continue;
          }
          const T* src = plane + iy * static_cast<long>(g.w);
          std::fill(dst, dst + lo, T(0));
          if (g.stride == 1) {
            std::copy(src + (off + static_cast<long>(lo)), src + (off + static_cast<long>(hi)), dst + lo);
          } else {
            for (std::size_t ox = lo; ox < hi; ++ox) dst[ox] = src[static_cast<long>(ox) * g.stride + off];
          }
          std::fill(dst + hi, dst + g.wo, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, const ConvGeometry& g, T* dx) {
  const long h = static_cast<long>(g.h);
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    T* plane = dx + ci * g.h * g.w;
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        const T* row = col + ((ci * g.k + ky) * g.k + kx) * g.cols();
        std::size_t lo, hi;
        valid_columns(g, kx, lo, hi);
        const long off = static_cast<long>(kx) - g.pad;
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const long iy = static_cast<long>(oy) * g.stride - g.pad + static_cast<long>(ky);
          if (iy < 0 || iy >= h) continue;
          T* dst = plane + iy * static_cast<long>(g.w);
          const T* src = row + oy * g.wo;
          for (std::size_t ox = lo; ox < hi; ++ox) dst[static_cast<long>(ox) * g.stride + off] += src[ox];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int stride, int padding) {
  const Shape si = input.shape();
  const Shape sw = weight.shape();
  if (stride < 1) throw ContractError("conv2d: stride must be positive");
  if (padding < 0) throw ContractError("conv2d: padding must be non-negative");
  if (sw.h != sw.w) {
    throw DimensionError("conv2d: kernel height (axis 2) " + std::to_string(sw.h) +
                         " differs from kernel width (axis 3) " + std::to_string(sw.w));
  }
  if (si.c != sw.c) {
    throw DimensionError("conv2d: input channels (axis 1) = " + std::to_string(si.c) +
                         " but weight expects " + std::to_string(sw.c));
  }
  if (bias.defined() && bias.numel() != sw.n) {
    throw DimensionError("conv2d: bias holds " + std::to_string(bias.numel()) +
                         " values for " + std::to_string(sw.n) + " output channels (axis 0 of weight)");
  }
  const long span_h = static_cast<long>(si.h) + 2 * padding - static_cast<long>(sw.h);
  const long span_w = static_cast<long>(si.w) + 2 * padding - static_cast<long>(sw.w);
  if (span_h < 0) throw DimensionError("conv2d: height (axis 2) smaller than kernel for " + si.str());
  if (span_w < 0) throw DimensionError("conv2d: width (axis 3) smaller than kernel for " + si.str());

  ConvGeometry g{si.c, si.h, si.w, sw.n, sw.h,
                 static_cast<std::size_t>(span_h / stride + 1),
                 static_cast<std::size_t>(span_w / stride + 1), stride, padding};
  const Shape so{si.n, g.cout, g.ho, g.wo};
  std::vector<T> out(so.numel());

  auto x = input.data();
  auto wv = weight.data();
  const ConstMapMat<T> W(wv.data(), g.cout, g.rows());
  const long batch = static_cast<long>(si.n);
  const std::size_t in_stride = si.c * si.plane();
  const std::size_t out_stride = g.cout * g.cols();

#pragma omp parallel
  {
    std::vector<T> col(g.rows() * g.cols());
#pragma omp for schedule(static)
    for (long n = 0; n < batch; ++n) {
      im2col(x.data() + n * in_stride, g, col.data());
      MapMat<T> O(out.data() + n * out_stride, g.cout, g.cols());
      O.noalias() = W * ConstMapMat<T>(col.data(), g.rows(), g.cols());
      if (bias.defined()) {
        auto b = bias.data();
        for (std::size_t co = 0; co < g.cout; ++co) O.row(co).array() += b[co];
      }
    }
  }

  return Tensor<T>::from_op(so, std::move(out), {input, weight, bias}, [g, in_stride, out_stride,
                                                                         batch](detail::Node<T>& self) {
    auto& px = *self.parents[0];
    auto& pw = *self.parents[1];
    detail::Node<T>* pb = self.parents.size() > 2 && self.parents[2] ? self.parents[2].get() : nullptr;
    const ConstMapMat<T> W(pw.value.data(), g.cout, g.rows());
    const bool need_dx = px.requires_grad;
    const bool need_dw = pw.requires_grad;
    std::vector<T> dw_parts(need_dw ? static_cast<std::size_t>(batch) * g.cout * g.rows() : 0);
    if (need_dx) px.ensure_grad();

#pragma omp parallel
    {
      std::vector<T> col(g.rows() * g.cols());
#pragma omp for schedule(static)
      for (long n = 0; n < batch; ++n) {
        const ConstMapMat<T> dO(self.grad.data() + n * out_stride, g.cout, g.cols());
        if (need_dw) {
          im2col(px.value.data() + n * in_stride, g, col.data());
          MapMat<T> dW(dw_parts.data() + n * g.cout * g.rows(), g.cout, g.rows());
          dW.noalias() = dO * ConstMapMat<T>(col.data(), g.rows(), g.cols()).transpose();
        }
        if (need_dx) {
          MapMat<T> dcol(col.data(), g.rows(), g.cols());
          dcol.noalias() = W.transpose() * dO;
          col2im_add(col.data(), g, px.grad.data() + n * in_stride);
        }
      }
    }

    if (need_dw) {
      auto gw = pw.ensure_grad();
      const std::size_t kw = g.cout * g.rows();
      for (long n = 0; n < batch; ++n)
        for (std::size_t i = 0; i < kw; ++i) gw[i] += dw_parts[n * kw + i];
    }
    if (pb && pb->requires_grad) {
      auto gb = pb->ensure_grad();
      for (long n = 0; n < batch; ++n)
        for (std::size_t co = 0; co < g.cout; ++co) {
          const T* row = self.grad.data() + n * out_stride + co * g.cols();
          T acc = 0;
          for (std::size_t i = 0; i < g.cols(); ++i) acc += row[i];
          gb[co] += acc;
        }
    }
  });
}

template Tensor<float> conv2d<float>(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&,
                                     int, int);
template Tensor<double> conv2d<double>(const Tensor<double>&, const Tensor<double>&,
                                       const Tensor<double>&, int, int);

}  // namespace ucgan::nn
