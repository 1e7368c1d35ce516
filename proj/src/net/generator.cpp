#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/net/net.hpp"
#include "ucgan/nn/ops.hpp"

namespace ucgan::net {

void check_geometry(const nn::Shape& pan, const nn::Shape& lrms, std::size_t min_side) {
  if (pan.c != 1) throw ContractError("PAN must have 1 channel (axis 1), got " + pan.str());
  if (lrms.c != 4) throw ContractError("LR MS must have 4 channels (axis 1), got " + lrms.str());
  if (pan.n != lrms.n) throw ContractError("batch (axis 0) differs: PAN " + pan.str() + ", LR MS " + lrms.str());
  if (pan.h != 4 * lrms.h || pan.w != 4 * lrms.w) {
    throw ContractError("PAN " + pan.str() + " is not 4x the LR MS " + lrms.str());
  }
  if (pan.h < min_side || pan.w < min_side) {
    throw ContractError("PAN " + pan.str() + " is smaller than " + std::to_string(min_side) + " pixels");
  }
}

template <typename T>
Generator<T>::Generator(const GeneratorConfig& config) : config_(config) {
  config_.filter.validate();
  std::mt19937_64 rng(config.seed);
  const std::size_t f = config.features;
  emb_pan_conv_ = make_conv(params_, "G.emb_pan.conv", 4, f, 3, 1, 1, rng);
  emb_pan_block_ = make_block(params_, "G.emb_pan.block0", config.block, f, rng);
  emb_ms_conv_ = make_conv(params_, "G.emb_ms.conv", 4, f, 3, 1, 1, rng);
  emb_ms_block_ = make_block(params_, "G.emb_ms.block0", config.block, f, rng);
  fusion_conv_ = make_conv(params_, "G.fusion.conv", 2 * f, f, 3, 1, 1, rng);
  for (int i = 0; i < 3; ++i) {
    fusion_blocks_.push_back(make_block(params_, "G.fusion.block" + std::to_string(i), config.block, f, rng));
  }
  rst_block_ = make_block(params_, "G.rst.block0", config.block, f, rng);
  rst_conv_ = make_conv(params_, "G.rst.conv", f, 4, 3, 1, 1, rng, config.zero_init_output);
}

template <typename T>
Tensor<T> Generator<T>::operator()(const Tensor<T>& pan, const Tensor<T>& lrms) const {
  check_geometry(pan.shape(), lrms.shape(), 16);
  const auto up = imaging::bicubic_resize(lrms, imaging::kUpsample4);
  const auto pan_hp = imaging::high_pass(imaging::replicate_pan(pan), config_.filter);
  const auto ms_hp = imaging::high_pass(up, config_.filter);

  const auto e_pan = emb_pan_block_(nn::relu(emb_pan_conv_(pan_hp)));
  const auto e_ms = emb_ms_block_(nn::relu(emb_ms_conv_(ms_hp)));
  auto h = nn::relu(fusion_conv_(nn::concat_channels(e_pan, e_ms)));
  for (const auto& b : fusion_blocks_) h = b(h);
  const auto residual = rst_conv_(rst_block_(h));
  return nn::add(up, residual);
}

template class Generator<float>;
template class Generator<double>;

}  // namespace ucgan::net
