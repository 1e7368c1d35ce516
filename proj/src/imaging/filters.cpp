#include "ucgan/imaging/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ucgan/nn/ops.hpp"

namespace ucgan::imaging {

namespace {

template <typename T>
void apply_axis_rows(const T* in, std::size_t rows, const AxisOperator& op, T* out) {
  // Horizontal: every row of length in_size maps to a row of length out_size.
  const bool unit = op.divisor == 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = in + r * op.in_size;
    T* dst = out + r * op.out_size;
    for (std::size_t o = 0; o < op.out_size; ++o) {
      T acc = 0;
      for (const auto& tap : op.taps[o]) acc += static_cast<T>(tap.weight) * src[tap.index];
      dst[o] = unit ? acc : acc / static_cast<T>(op.divisor);
    }
  }
}

template <typename T>
void apply_axis_cols(const T* in, std::size_t cols, const AxisOperator& op, T* out) {
  // Vertical: in is (in_size x cols), out is (out_size x cols).
  const bool unit = op.divisor == 1.0;
  for (std::size_t o = 0; o < op.out_size; ++o) {
    T* dst = out + o * cols;
    std::fill_n(dst, cols, T(0));
    for (const auto& tap : op.taps[o]) {
      const T w = static_cast<T>(tap.weight);
      const T* src = in + tap.index * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
    if (!unit)
      for (std::size_t c = 0; c < cols; ++c) dst[c] /= static_cast<T>(op.divisor);
  }
}

template <typename T>
void transpose_axis_rows(const T* dout, std::size_t rows, const AxisOperator& op, T* din) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = dout + r * op.out_size;
    T* dst = din + r * op.in_size;
    for (std::size_t o = 0; o < op.out_size; ++o) {
      const T g = src[o] / static_cast<T>(op.divisor);
      for (const auto& tap : op.taps[o]) dst[tap.index] += static_cast<T>(tap.weight) * g;
    }
  }
}

template <typename T>
void transpose_axis_cols(const T* dout, std::size_t cols, const AxisOperator& op, T* din) {
  for (std::size_t o = 0; o < op.out_size; ++o) {
    const T* src = dout + o * cols;
    for (const auto& tap : op.taps[o]) {
      const T w = static_cast<T>(tap.weight / op.divisor);
      T* dst = din + tap.index * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
  }
}

}  // namespace

template <typename T>
nn::Tensor<T> apply_separable(const nn::Tensor<T>& x, const AxisOperator& vertical,
                              const AxisOperator& horizontal) {
  const nn::Shape s = x.shape();
  if (vertical.in_size != s.h) {
    throw DimensionError("apply_separable: height (axis 2) " + std::to_string(s.h) +
                         " does not match operator input " + std::to_string(vertical.in_size));
  }
  if (horizontal.in_size != s.w) {
    throw DimensionError("apply_separable: width (axis 3) " + std::to_string(s.w) +
                         " does not match operator input " + std::to_string(horizontal.in_size));
  }
  const nn::Shape so{s.n, s.c, vertical.out_size, horizontal.out_size};
  const std::size_t slices = s.n * s.c;
  const std::size_t mid_plane = s.h * so.w;
  std::vector<T> mid(slices * mid_plane);
  std::vector<T> out(so.numel());
  auto v = x.data();
  for (std::size_t k = 0; k < slices; ++k) {
    apply_axis_rows(v.data() + k * s.plane(), s.h, horizontal, mid.data() + k * mid_plane);
    apply_axis_cols(mid.data() + k * mid_plane, so.w, vertical, out.data() + k * so.plane());
  }
  return nn::Tensor<T>::from_op(
      so, std::move(out), {x}, [vertical, horizontal, s, so](nn::detail::Node<T>& self) {
        auto g = self.parents[0]->ensure_grad();
        const std::size_t slices = s.n * s.c;
        const std::size_t mid_plane = s.h * so.w;
        std::vector<T> dmid(mid_plane);
        for (std::size_t k = 0; k < slices; ++k) {
          std::fill(dmid.begin(), dmid.end(), T(0));
          transpose_axis_cols(self.grad.data() + k * so.plane(), so.w, vertical, dmid.data());
          transpose_axis_rows(dmid.data(), s.h, horizontal, g.data() + k * s.plane());
        }
      });
}

void FilterSpec::validate() const {
  if (size < 3 || size % 2 == 0) {
    throw ContractError("filter: kernel size must be odd and >= 3, got " + std::to_string(size));
  }
  if (kind == FilterKind::gaussian && !(sigma > 0.0)) {
    throw ContractError("filter: gaussian sigma must be positive");
  }
}

std::vector<double> FilterSpec::weights_1d() const {
  validate();
  std::vector<double> w(static_cast<std::size_t>(size), 1.0);
  if (kind == FilterKind::box) return w;
  const int r = size / 2;
  double total = 0.0;
  for (int i = -r; i <= r; ++i) {
    w[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += w[static_cast<std::size_t>(i + r)];
  }
  for (auto& v : w) v /= total;
  return w;
}

AxisOperator smoothing_operator(const FilterSpec& spec, std::size_t length) {
  const auto w = spec.weights_1d();
  const int r = spec.size / 2;
  AxisOperator op;
  op.in_size = length;
  op.out_size = length;
  // Box weights stay at 1 and divide once, so constant images pass through exactly.
  op.divisor = spec.kind == FilterKind::box ? static_cast<double>(spec.size) : 1.0;
  op.taps.resize(length);
  const long last = static_cast<long>(length) - 1;
  for (long i = 0; i < static_cast<long>(length); ++i) {
    auto& taps = op.taps[static_cast<std::size_t>(i)];
    for (int k = -r; k <= r; ++k) {
      const auto idx = static_cast<std::uint32_t>(std::clamp(i + k, 0L, last));
      taps.push_back({idx, w[static_cast<std::size_t>(k + r)]});
    }
  }
  return op;
}

template <typename T>
nn::Tensor<T> low_pass(const nn::Tensor<T>& img, const FilterSpec& spec) {
  spec.validate();
  const nn::Shape s = img.shape();
  return apply_separable(img, smoothing_operator(spec, s.h), smoothing_operator(spec, s.w));
}

template <typename T>
nn::Tensor<T> high_pass(const nn::Tensor<T>& img, const FilterSpec& spec) {
  return nn::sub(img, low_pass(img, spec));
}

template nn::Tensor<float> apply_separable<float>(const nn::Tensor<float>&, const AxisOperator&,
                                                  const AxisOperator&);
template nn::Tensor<double> apply_separable<double>(const nn::Tensor<double>&, const AxisOperator&,
                                                    const AxisOperator&);
template nn::Tensor<float> low_pass<float>(const nn::Tensor<float>&, const FilterSpec&);
template nn::Tensor<double> low_pass<double>(const nn::Tensor<double>&, const FilterSpec&);
template nn::Tensor<float> high_pass<float>(const nn::Tensor<float>&, const FilterSpec&);
template nn::Tensor<double> high_pass<double>(const nn::Tensor<double>&, const FilterSpec&);

}  // namespace ucgan::imaging
