#include "ucgan/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucgan::nn {

namespace {

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa == sb) return;
  const char* axis = sa.n != sb.n ? "batch (axis 0)"
                     : sa.c != sb.c ? "channels (axis 1)"
                     : sa.h != sb.h ? "height (axis 2)"
                                    : "width (axis 3)";
  throw DimensionError(std::string(op) + ": " + axis + " mismatch between " + sa.str() +
                       " and " + sb.str());
}

template <typename T>
bool wants_grad(const std::shared_ptr<detail::Node<T>>& p) {
  return p->requires_grad;
}

// Elementwise unary op with derivative expressed through (input, output).
template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& x, F f, D dfdx) {
  auto in = x.data();
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [dfdx](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    auto g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
    }
  });
}

}  // namespace

template <typename T>
Tensor<T> instance_norm(const Tensor<T>& input, T eps) {
  const Shape s = input.shape();
  const std::size_t plane = s.plane();
  if (plane < 2) {
    throw DimensionError("instance_norm: spatial size (axes 2, 3) must hold at least 2 values, got " +
                         s.str());
  }
  auto x = input.data();
  std::vector<T> out(x.size());
  std::vector<T> inv_std(s.n * s.c);
  for (std::size_t slice = 0; slice < s.n * s.c; ++slice) {
    const T* px = x.data() + slice * plane;
    T* po = out.data() + slice * plane;
    T mu = 0;
    for (std::size_t i = 0; i < plane; ++i) mu += px[i];
    mu /= static_cast<T>(plane);
    T var = 0;
    for (std::size_t i = 0; i < plane; ++i) var += (px[i] - mu) * (px[i] - mu);
    var /= static_cast<T>(plane);
    const T is = T(1) / std::sqrt(var + eps);
    inv_std[slice] = is;
    for (std::size_t i = 0; i < plane; ++i) po[i] = (px[i] - mu) * is;
  }
  return Tensor<T>::from_op(
      s, std::move(out), {input}, [inv_std = std::move(inv_std), plane](detail::Node<T>& self) {
        auto g = self.parents[0]->ensure_grad();
        const auto& y = self.value;
        const auto& dy = self.grad;
        for (std::size_t slice = 0; slice < inv_std.size(); ++slice) {
          const std::size_t base = slice * plane;
          T mean_dy = 0, mean_dyy = 0;
          for (std::size_t i = 0; i < plane; ++i) {
            mean_dy += dy[base + i];
            mean_dyy += dy[base + i] * y[base + i];
          }
          mean_dy /= static_cast<T>(plane);
          mean_dyy /= static_cast<T>(plane);
          for (std::size_t i = 0; i < plane; ++i) {
            g[base + i] += inv_std[slice] * (dy[base + i] - mean_dy - y[base + i] * mean_dyy);
          }
        }
      });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
  return unary(
      input, [](T v) { return v > T(0) ? v : T(0); },
      [](T v, T) { return v > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& input, T slope) {
  return unary(
      input, [slope](T v) { return v > T(0) ? v : slope * v; },
      [slope](T v, T) { return v > T(0) ? T(1) : slope; });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& input) {
  return unary(
      input, [](T v) { return T(1) / (T(1) + std::exp(-v)); },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& input) {
  return unary(
      input, [](T v) { return std::abs(v); },
      [](T v, T) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& input) {
  const Shape s = input.shape();
  const std::size_t plane = s.plane();
  auto x = input.data();
  std::vector<T> out(s.n * s.c);
  for (std::size_t slice = 0; slice < out.size(); ++slice) {
    T acc = 0;
    for (std::size_t i = 0; i < plane; ++i) acc += x[slice * plane + i];
    out[slice] = acc / static_cast<T>(plane);
  }
  return Tensor<T>::from_op(Shape{s.n, s.c, 1, 1}, std::move(out), {input},
                            [plane](detail::Node<T>& self) {
                              auto g = self.parents[0]->ensure_grad();
                              const T inv = T(1) / static_cast<T>(plane);
                              for (std::size_t slice = 0; slice < self.grad.size(); ++slice) {
                                const T d = self.grad[slice] * inv;
                                for (std::size_t i = 0; i < plane; ++i) g[slice * plane + i] += d;
                              }
                            });
}

template <typename T>
Tensor<T> channel_max(const Tensor<T>& input) {
  const Shape s = input.shape();
  if (s.c < 1) throw DimensionError("channel_max: no channels (axis 1)");
  const std::size_t plane = s.plane();
  auto x = input.data();
  std::vector<T> out(s.n * plane);
  std::vector<std::uint32_t> argmax(s.n * plane);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t i = 0; i < plane; ++i) {
      std::uint32_t best = 0;
      T v = x[s.offset(n, 0, 0, 0) + i];
      for (std::size_t c = 1; c < s.c; ++c) {
        const T candidate = x[s.offset(n, c, 0, 0) + i];
        if (candidate > v) {
          v = candidate;
          best = static_cast<std::uint32_t>(c);
        }
      }
      out[n * plane + i] = v;
      argmax[n * plane + i] = best;
    }
  }
  return Tensor<T>::from_op(Shape{s.n, 1, s.h, s.w}, std::move(out), {input},
                            [argmax = std::move(argmax), s](detail::Node<T>& self) {
                              auto g = self.parents[0]->ensure_grad();
                              const std::size_t plane = s.plane();
                              for (std::size_t n = 0; n < s.n; ++n) {
                                for (std::size_t i = 0; i < plane; ++i) {
                                  g[s.offset(n, argmax[n * plane + i], 0, 0) + i] +=
                                      self.grad[n * plane + i];
                                }
                              }
                            });
}

template <typename T>
Tensor<T> channel_mean(const Tensor<T>& input) {
  const Shape s = input.shape();
  const std::size_t plane = s.plane();
  auto x = input.data();
  std::vector<T> out(s.n * plane, T(0));
  const T inv = T(1) / static_cast<T>(s.c);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (std::size_t i = 0; i < plane; ++i) out[n * plane + i] += x[s.offset(n, c, 0, 0) + i];
    }
    for (std::size_t i = 0; i < plane; ++i) out[n * plane + i] *= inv;
  }
  return Tensor<T>::from_op(Shape{s.n, 1, s.h, s.w}, std::move(out), {input},
                            [s, inv](detail::Node<T>& self) {
                              auto g = self.parents[0]->ensure_grad();
                              const std::size_t plane = s.plane();
                              for (std::size_t n = 0; n < s.n; ++n) {
                                for (std::size_t c = 0; c < s.c; ++c) {
                                  for (std::size_t i = 0; i < plane; ++i) {
                                    g[s.offset(n, c, 0, 0) + i] += self.grad[n * plane + i] * inv;
                                  }
                                }
                              }
                            });
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  if (sa.n != sb.n) throw DimensionError("concat_channels: batch (axis 0) mismatch " + sa.str() + " vs " + sb.str());
  if (sa.h != sb.h) throw DimensionError("concat_channels: height (axis 2) mismatch " + sa.str() + " vs " + sb.str());
  if (sa.w != sb.w) throw DimensionError("concat_channels: width (axis 3) mismatch " + sa.str() + " vs " + sb.str());
  const Shape so{sa.n, sa.c + sb.c, sa.h, sa.w};
  const std::size_t ka = sa.c * sa.plane();
  const std::size_t kb = sb.c * sb.plane();
  std::vector<T> out(so.numel());
  auto xa = a.data();
  auto xb = b.data();
  for (std::size_t n = 0; n < so.n; ++n) {
    std::copy_n(xa.data() + n * ka, ka, out.data() + n * (ka + kb));
    std::copy_n(xb.data() + n * kb, kb, out.data() + n * (ka + kb) + ka);
  }
  return Tensor<T>::from_op(so, std::move(out), {a, b}, [ka, kb, n_batch = so.n](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto g = pa.ensure_grad();
      for (std::size_t n = 0; n < n_batch; ++n)
        for (std::size_t i = 0; i < ka; ++i) g[n * ka + i] += self.grad[n * (ka + kb) + i];
    }
    if (pb.requires_grad) {
      auto g = pb.ensure_grad();
      for (std::size_t n = 0; n < n_batch; ++n)
        for (std::size_t i = 0; i < kb; ++i) g[n * kb + i] += self.grad[n * (ka + kb) + ka + i];
    }
  });
}

template <typename T>
Tensor<T> gather_channels(const Tensor<T>& input, const std::vector<int>& index) {
  const Shape s = input.shape();
  for (int c : index) {
    if (c < 0 || static_cast<std::size_t>(c) >= s.c) {
      throw DimensionError("gather_channels: channel index " + std::to_string(c) +
                           " out of range for channels (axis 1) of " + s.str());
    }
  }
  const Shape so{s.n, index.size(), s.h, s.w};
  const std::size_t plane = s.plane();
  auto x = input.data();
  std::vector<T> out(so.numel());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t k = 0; k < index.size(); ++k) {
      std::copy_n(x.data() + s.offset(n, index[k], 0, 0), plane, out.data() + so.offset(n, k, 0, 0));
    }
  }
  return Tensor<T>::from_op(so, std::move(out), {input}, [index, s, so](detail::Node<T>& self) {
    auto g = self.parents[0]->ensure_grad();
    const std::size_t plane = s.plane();
    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t k = 0; k < index.size(); ++k) {
        const T* src = self.grad.data() + so.offset(n, k, 0, 0);
        T* dst = g.data() + s.offset(n, index[k], 0, 0);
        for (std::size_t i = 0; i < plane; ++i) dst[i] += src[i];
      }
    }
  });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  auto xa = a.data();
  auto xb = b.data();
  std::vector<T> out(xa.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xa[i] + xb[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](detail::Node<T>& self) {
    for (auto& p : self.parents) {
      if (!wants_grad(p)) continue;
      auto g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("sub", a, b);
  auto xa = a.data();
  auto xb = b.data();
  std::vector<T> out(xa.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xa[i] - xb[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](detail::Node<T>& self) {
    if (wants_grad(self.parents[0])) {
      auto g = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants_grad(self.parents[1])) {
      auto g = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  auto xa = a.data();
  auto xb = b.data();
  std::vector<T> out(xa.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xa[i] * xb[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      auto g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary(
      a, [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T value) {
  return unary(
      a, [value](T v) { return v + value; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> mul_channelwise(const Tensor<T>& x, const Tensor<T>& s) {
  const Shape sx = x.shape();
  const Shape ss = s.shape();
  if (ss.n != sx.n) throw DimensionError("mul_channelwise: batch (axis 0) mismatch " + sx.str() + " vs " + ss.str());
  if (ss.c != sx.c) throw DimensionError("mul_channelwise: channels (axis 1) mismatch " + sx.str() + " vs " + ss.str());
  if (ss.h != 1 || ss.w != 1) throw DimensionError("mul_channelwise: scale must be (N, C, 1, 1), got " + ss.str());
  const std::size_t plane = sx.plane();
  auto xv = x.data();
  auto sv = s.data();
  std::vector<T> out(xv.size());
  for (std::size_t slice = 0; slice < sv.size(); ++slice)
    for (std::size_t i = 0; i < plane; ++i) out[slice * plane + i] = xv[slice * plane + i] * sv[slice];
  return Tensor<T>::from_op(sx, std::move(out), {x, s}, [plane](detail::Node<T>& self) {
    auto& px = *self.parents[0];
    auto& ps = *self.parents[1];
    const std::size_t slices = ps.value.size();
    if (px.requires_grad) {
      auto g = px.ensure_grad();
      for (std::size_t slice = 0; slice < slices; ++slice)
        for (std::size_t i = 0; i < plane; ++i)
          g[slice * plane + i] += self.grad[slice * plane + i] * ps.value[slice];
    }
    if (ps.requires_grad) {
      auto g = ps.ensure_grad();
      for (std::size_t slice = 0; slice < slices; ++slice) {
        T acc = 0;
        for (std::size_t i = 0; i < plane; ++i)
          acc += self.grad[slice * plane + i] * px.value[slice * plane + i];
        g[slice] += acc;
      }
    }
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T acc = 0;
  for (T v : a.data()) acc += v;
  return Tensor<T>::from_op(Shape{}, std::vector<T>{acc}, {a}, [](detail::Node<T>& self) {
    auto g = self.parents[0]->ensure_grad();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  T acc = 0;
  for (T v : a.data()) acc += v;
  const T inv = T(1) / static_cast<T>(a.numel());
  return Tensor<T>::from_op(Shape{}, std::vector<T>{acc * inv}, {a}, [inv](detail::Node<T>& self) {
    auto g = self.parents[0]->ensure_grad();
    const T d = self.grad[0] * inv;
    for (auto& v : g) v += d;
  });
}

template <typename T>
Tensor<T> l1_mean(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("l1_mean", a, b);
  auto xa = a.data();
  auto xb = b.data();
  T acc = 0;
  for (std::size_t i = 0; i < xa.size(); ++i) acc += std::abs(xa[i] - xb[i]);
  const T inv = T(1) / static_cast<T>(xa.size());
  return Tensor<T>::from_op(Shape{}, std::vector<T>{acc * inv}, {a, b}, [inv](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const T d = self.grad[0] * inv;
    auto sign = [](T v) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); };
    if (pa.requires_grad) {
      auto g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += d * sign(pa.value[i] - pb.value[i]);
    }
    if (pb.requires_grad) {
      auto g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= d * sign(pa.value[i] - pb.value[i]);
    }
  });
}

template <typename T>
Tensor<T> sq_mean(const Tensor<T>& a, T target) {
  T acc = 0;
  for (T v : a.data()) acc += (v - target) * (v - target);
  const T inv = T(1) / static_cast<T>(a.numel());
  return Tensor<T>::from_op(Shape{}, std::vector<T>{acc * inv}, {a},
                            [inv, target](detail::Node<T>& self) {
                              auto& p = *self.parents[0];
                              auto g = p.ensure_grad();
                              const T d = T(2) * self.grad[0] * inv;
                              for (std::size_t i = 0; i < g.size(); ++i) g[i] += d * (p.value[i] - target);
                            });
}

template <typename T>
Tensor<T> stack_batch(const std::vector<Tensor<T>>& items) {
  if (items.empty()) throw ContractError("stack_batch: empty item list");
  const Shape first = items.front().shape();
  std::vector<T> out;
  out.reserve(first.numel() * items.size());
  for (const auto& item : items) {
    const Shape s = item.shape();
    if (s.c != first.c || s.h != first.h || s.w != first.w) {
      throw DimensionError("stack_batch: item shape " + s.str() + " differs from " + first.str());
    }
    out.insert(out.end(), item.data().begin(), item.data().end());
  }
  std::size_t n = 0;
  for (const auto& item : items) n += item.shape().n;
  return Tensor<T>(Shape{n, first.c, first.h, first.w}, std::move(out));
}

template <typename T>
Tensor<T> batch_item(const Tensor<T>& batch, std::size_t index) {
  const Shape s = batch.shape();
  if (index >= s.n) throw DimensionError("batch_item: index beyond batch (axis 0) of " + s.str());
  const std::size_t k = s.c * s.plane();
  auto x = batch.data();
  return Tensor<T>(Shape{1, s.c, s.h, s.w}, std::vector<T>(x.begin() + index * k, x.begin() + (index + 1) * k));
}

#define UCGAN_INSTANTIATE_OPS(T)                                                            \
  template Tensor<T> instance_norm<T>(const Tensor<T>&, T);                                 \
  template Tensor<T> relu<T>(const Tensor<T>&);                                             \
  template Tensor<T> leaky_relu<T>(const Tensor<T>&, T);                                    \
  template Tensor<T> sigmoid<T>(const Tensor<T>&);                                          \
  template Tensor<T> abs<T>(const Tensor<T>&);                                              \
  template Tensor<T> global_avg_pool<T>(const Tensor<T>&);                                  \
  template Tensor<T> channel_max<T>(const Tensor<T>&);                                      \
  template Tensor<T> channel_mean<T>(const Tensor<T>&);                                     \
  template Tensor<T> concat_channels<T>(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> gather_channels<T>(const Tensor<T>&, const std::vector<int>&);         \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> sub<T>(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> scale<T>(const Tensor<T>&, T);                                         \
  template Tensor<T> add_scalar<T>(const Tensor<T>&, T);                                    \
  template Tensor<T> mul_channelwise<T>(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> sum<T>(const Tensor<T>&);                                              \
  template Tensor<T> mean<T>(const Tensor<T>&);                                             \
  template Tensor<T> l1_mean<T>(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> sq_mean<T>(const Tensor<T>&, T);                                       \
  template Tensor<T> stack_batch<T>(const std::vector<Tensor<T>>&);                         \
  template Tensor<T> batch_item<T>(const Tensor<T>&, std::size_t);

UCGAN_INSTANTIATE_OPS(float)
UCGAN_INSTANTIATE_OPS(double)

}  // namespace ucgan::nn
