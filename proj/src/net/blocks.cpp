#include "ucgan/error.hpp"
#include "ucgan/net/net.hpp"
#include "ucgan/nn/ops.hpp"

namespace ucgan::net {

std::string to_string(BlockKind kind) { return kind == BlockKind::rca ? "rca" : "res"; }

BlockKind parse_block_kind(const std::string& text) {
  if (text == "rca") return BlockKind::rca;
  if (text == "res" || text == "residual") return BlockKind::residual;
  throw ContractError("unknown block kind '" + text + "' (expected rca or res)");
}

template <typename T>
Tensor<T> Conv<T>::operator()(const Tensor<T>& x) const {
  return nn::conv2d(x, weight, bias, stride, padding);
}

template <typename T>
Conv<T> make_conv(ParameterSet<T>& params, const std::string& name, std::size_t cin, std::size_t cout, int k,
                  int stride, int padding, std::mt19937_64& rng, bool zero) {
  const auto ku = static_cast<std::size_t>(k);
  std::vector<T> w(cout * cin * ku * ku, T{0});
  if (!zero) {
    std::normal_distribution<double> dist(0.0, kInitStd);
    for (auto& v : w) v = static_cast<T>(dist(rng));
  }
  Conv<T> c;
  c.weight = params.add(name + ".weight", Tensor<T>(nn::Shape{cout, cin, ku, ku}, std::move(w)));
  c.bias = params.add(name + ".bias", Tensor<T>(nn::Shape{cout, 1, 1, 1}, T{0}));
  c.stride = stride;
  c.padding = padding;
  return c;
}

template <typename T>
Block<T> make_block(ParameterSet<T>& params, const std::string& prefix, BlockKind kind, std::size_t channels,
                    std::mt19937_64& rng) {
  Block<T> b;
  b.kind = kind;
  b.channels = channels;
  b.conv1 = make_conv(params, prefix + ".conv1", channels, channels, 3, 1, 1, rng);
  b.conv2 = make_conv(params, prefix + ".conv2", channels, channels, 3, 1, 1, rng);
  if (kind == BlockKind::rca) {
    const std::size_t hidden = channels / kRcaReduction;
    if (hidden == 0) throw ContractError("make_block: too few channels for the attention reduction");
    b.fc1 = make_conv(params, prefix + ".fc1", channels, hidden, 1, 1, 0, rng);
    b.fc2 = make_conv(params, prefix + ".fc2", hidden, channels, 1, 1, 0, rng);
  }
  return b;
}

namespace {

template <typename T>
void check_channels(const char* name, const Block<T>& b, const Tensor<T>& x) {
  if (x.shape().c != b.channels) {
    throw ContractError(std::string(name) + ": expected " + std::to_string(b.channels) +
                        " channels (axis 1), got " + x.shape().str());
  }
}

}  // namespace

template <typename T>
Tensor<T> rca_block(const Block<T>& b, const Tensor<T>& x) {
  check_channels("rca_block", b, x);
  if (b.kind != BlockKind::rca) throw ContractError("rca_block: block has no attention layers");
  const auto y = b.conv2(nn::relu(nn::instance_norm(b.conv1(x))));
  const auto s = nn::sigmoid(b.fc2(nn::relu(b.fc1(nn::global_avg_pool(y)))));
  return nn::add(x, nn::mul_channelwise(y, s));
}

template <typename T>
Tensor<T> residual_block(const Block<T>& b, const Tensor<T>& x) {
  check_channels("residual_block", b, x);
  const auto y = nn::instance_norm(b.conv2(nn::relu(nn::instance_norm(b.conv1(x)))));
  return nn::add(x, y);
}

template <typename T>
Tensor<T> Block<T>::operator()(const Tensor<T>& x) const {
  return kind == BlockKind::rca ? rca_block(*this, x) : residual_block(*this, x);
}

#define UCGAN_INSTANTIATE_BLOCKS(T)                                                                        \
  template struct Conv<T>;                                                                                 \
  template struct Block<T>;                                                                                \
  template Conv<T> make_conv<T>(ParameterSet<T>&, const std::string&, std::size_t, std::size_t, int, int, \
                                int, std::mt19937_64&, bool);                                              \
  template Block<T> make_block<T>(ParameterSet<T>&, const std::string&, BlockKind, std::size_t,           \
                                  std::mt19937_64&);                                                       \
  template Tensor<T> rca_block<T>(const Block<T>&, const Tensor<T>&);                                      \
  template Tensor<T> residual_block<T>(const Block<T>&, const Tensor<T>&);

UCGAN_INSTANTIATE_BLOCKS(float)
UCGAN_INSTANTIATE_BLOCKS(double)

}  // namespace ucgan::net
