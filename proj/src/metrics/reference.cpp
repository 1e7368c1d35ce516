#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ucgan/metrics/metrics.hpp"

namespace ucgan::metrics {

namespace {

template <typename T>
void require_pair(const char* name, const nn::Tensor<T>& a, const nn::Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(name) + ": shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  }
  if (a.shape().n != 1) throw DimensionError(std::string(name) + ": expected a single sample (axis 0 = 1)");
}

// "Valid" separable correlation of one plane with a 1-D kernel applied on both axes.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t ow = w - n + 1, oh = h - n + 1;
  std::vector<double> mid(h * ow);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * plane[y * w + x + i];
      mid[y * ow + x] = acc;
    }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * mid[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  return out;
}

}  // namespace

template <typename T>
double sam(const nn::Tensor<T>& reference, const nn::Tensor<T>& fused) {
  require_pair("sam", reference, fused);
  const nn::Shape s = reference.shape();
  const std::size_t plane = s.plane();
  auto r = reference.data();
  auto f = fused.data();
  double total = 0.0;
  for (std::size_t i = 0; i < plane; ++i) {
    double nr = 0.0, nf = 0.0;
    for (std::size_t c = 0; c < s.c; ++c) {
      const double rv = r[c * plane + i], fv = f[c * plane + i];
      nr += rv * rv;
      nf += fv * fv;
    }
    if (nr == 0.0 || nf == 0.0) continue;
    nr = std::sqrt(nr);
    nf = std::sqrt(nf);
    // Angle between unit vectors u, v as 2 atan2(|u - v|, |u + v|); exact zero for parallel spectra.
    double diff = 0.0, summ = 0.0;
    for (std::size_t c = 0; c < s.c; ++c) {
      const double u = r[c * plane + i] / nr, v = f[c * plane + i] / nf;
      diff += (u - v) * (u - v);
      summ += (u + v) * (u + v);
    }
    total += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(summ));
  }
  return total / static_cast<double>(plane) * 180.0 / std::numbers::pi;
}

template <typename T>
double ergas(const nn::Tensor<T>& reference, const nn::Tensor<T>& fused, double ratio) {
  require_pair("ergas", reference, fused);
  const nn::Shape s = reference.shape();
  const std::size_t plane = s.plane();
  auto r = reference.data();
  auto f = fused.data();
  double acc = 0.0;
  for (std::size_t c = 0; c < s.c; ++c) {
    double mse = 0.0, mu = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      const double d = static_cast<double>(r[c * plane + i]) - static_cast<double>(f[c * plane + i]);
      mse += d * d;
      mu += r[c * plane + i];
    }
    mse /= static_cast<double>(plane);
    mu /= static_cast<double>(plane);
    if (mu == 0.0) throw DegenerateInputError("ergas: reference band " + std::to_string(c) + " has zero mean");
    acc += mse / (mu * mu);
  }
  return 100.0 * ratio * std::sqrt(acc / static_cast<double>(s.c));
}

template <typename T>
double ssim(const nn::Tensor<T>& reference, const nn::Tensor<T>& fused, double dynamic_range) {
  require_pair("ssim", reference, fused);
  const nn::Shape s = reference.shape();
  if (s.h < kSsimWindow || s.w < kSsimWindow) {
    throw ContractError("ssim: image " + s.str() + " is smaller than the 11x11 window");
  }
  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  std::vector<double> k(kSsimWindow);
  double ksum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    ksum += k[i];
  }
  for (auto& v : k) v /= ksum;

  const std::size_t plane = s.plane();
  auto r = reference.data();
  auto f = fused.data();
  double band_total = 0.0;
  for (std::size_t c = 0; c < s.c; ++c) {
    std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      x[i] = r[c * plane + i];
      y[i] = f[c * plane + i];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, s.h, s.w, k);
    const auto my = filter_valid(y, s.h, s.w, k);
    const auto exx = filter_valid(xx, s.h, s.w, k);
    const auto eyy = filter_valid(yy, s.h, s.w, k);
    const auto exy = filter_valid(xy, s.h, s.w, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = exx[i] - mx[i] * mx[i];
      const double vy = eyy[i] - my[i] * my[i];
      const double cxy = exy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    band_total += acc / static_cast<double>(mx.size());
  }
  return band_total / static_cast<double>(s.c);
}

template double sam<float>(const nn::Tensor<float>&, const nn::Tensor<float>&);
template double sam<double>(const nn::Tensor<double>&, const nn::Tensor<double>&);
template double ergas<float>(const nn::Tensor<float>&, const nn::Tensor<float>&, double);
template double ergas<double>(const nn::Tensor<double>&, const nn::Tensor<double>&, double);
template double ssim<float>(const nn::Tensor<float>&, const nn::Tensor<float>&, double);
template double ssim<double>(const nn::Tensor<double>&, const nn::Tensor<double>&, double);

}  // namespace ucgan::metrics
