#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/net/net.hpp"
#include "ucgan/nn/ops.hpp"

namespace ucgan::net {

template <typename T>
Discriminator<T>::Discriminator(const DiscriminatorConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::size_t cin = 9;
  for (int i = 0; i < 5; ++i) {
    layers_.push_back(make_conv(params_, "D.conv" + std::to_string(i + 1), cin, kDiscChannels[i], 4,
                                kDiscStrides[i], 1, rng));
    cin = kDiscChannels[i];
  }
}

template <typename T>
std::size_t Discriminator<T>::output_side(std::size_t s) {
  for (int stride : kDiscStrides) {
    if (s + 2 < 4) return 0;
    s = (s + 2 - 4) / static_cast<std::size_t>(stride) + 1;
  }
  return s;
}

template <typename T>
Tensor<T> Discriminator<T>::operator()(const Tensor<T>& pan, const Tensor<T>& lrms, const Tensor<T>& fused) const {
  check_geometry(pan.shape(), lrms.shape(), 24);
  if (fused.shape() != nn::Shape{pan.shape().n, 4, pan.shape().h, pan.shape().w}) {
    throw ContractError("discriminator: fused " + fused.shape().str() + " does not match PAN " + pan.shape().str());
  }
  auto x = nn::concat_channels(nn::concat_channels(pan, imaging::bicubic_resize(lrms, imaging::kUpsample4)), fused);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i](x);
    if (i == layers_.size() - 1) break;
    if (i >= 1) x = nn::instance_norm(x);
    x = nn::leaky_relu(x, T(0.2));
  }
  return x;
}

template class Discriminator<float>;
template class Discriminator<double>;

}  // namespace ucgan::net
