#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ucgan/imaging/filters.hpp"
#include "ucgan/nn/parameters.hpp"

namespace ucgan::net {

using nn::ParameterSet;
using nn::Tensor;

enum class BlockKind { rca, residual };

std::string to_string(BlockKind kind);
/// Accepts "rca" and "res" / "residual".
BlockKind parse_block_kind(const std::string& text);

/// Standard deviation of the normal weight init.
inline constexpr double kInitStd = 0.02;

template <typename T>
struct Conv {
  Tensor<T> weight;  // (Cout, Cin, k, k)
  Tensor<T> bias;    // (Cout, 1, 1, 1)
  int stride = 1;
  int padding = 1;

  Tensor<T> operator()(const Tensor<T>& x) const;
};

/// Registers "<name>.weight" and "<name>.bias" in `params`. Weights are drawn
/// from normal(0, kInitStd) unless `zero` is set; biases start at zero.
template <typename T>
Conv<T> make_conv(ParameterSet<T>& params, const std::string& name, std::size_t cin, std::size_t cout, int k,
                  int stride, int padding, std::mt19937_64& rng, bool zero = false);

/// Feature block on `channels` maps. Residual kind:
///   x + IN(conv2(relu(IN(conv1 x))))
/// RCA kind:
///   y = conv2(relu(IN(conv1 x))); s = sigmoid(fc2(relu(fc1(gap(y))))); x + y * s
/// with fc1 / fc2 as 1x1 convolutions of reduction ratio 8.
template <typename T>
struct Block {
  BlockKind kind = BlockKind::rca;
  std::size_t channels = 32;
  Conv<T> conv1, conv2;
  Conv<T> fc1, fc2;  // RCA only

  Tensor<T> operator()(const Tensor<T>& x) const;
};

inline constexpr std::size_t kRcaReduction = 8;

template <typename T>
Block<T> make_block(ParameterSet<T>& params, const std::string& prefix, BlockKind kind, std::size_t channels,
                    std::mt19937_64& rng);

/// Free-function forms; both throw ContractError when x does not have the block's channel count.
template <typename T>
Tensor<T> rca_block(const Block<T>& block, const Tensor<T>& x);
template <typename T>
Tensor<T> residual_block(const Block<T>& block, const Tensor<T>& x);

// ---- generator ------------------------------------------------------------

struct GeneratorConfig {
  BlockKind block = BlockKind::rca;
  imaging::FilterSpec filter = imaging::averaging_filter();
  std::size_t features = 32;
  /// Zero weights and bias on the final 4-channel conv (identity start).
  bool zero_init_output = true;
  std::uint64_t seed = 0;
};

/// Two-stream generator. Each EmbNet stream is conv(4 -> 32) + ReLU followed by
/// one block; FusionNet is conv(64 -> 32) + ReLU followed by three blocks;
/// RstNet is one block followed by conv(32 -> 4). The residual is added to the
/// x4 bicubic upsampling of the LR MS.
template <typename T>
class Generator {
 public:
  explicit Generator(const GeneratorConfig& config = {});

  /// pan (N, 1, H, W), lrms (N, 4, H/4, W/4) -> (N, 4, H, W). H, W >= 16.
  Tensor<T> operator()(const Tensor<T>& pan, const Tensor<T>& lrms) const;

  ParameterSet<T>& params() { return params_; }
  const ParameterSet<T>& params() const { return params_; }
  const GeneratorConfig& config() const { return config_; }

 private:
  GeneratorConfig config_;
  ParameterSet<T> params_;
  Conv<T> emb_pan_conv_, emb_ms_conv_, fusion_conv_, rst_conv_;
  Block<T> emb_pan_block_, emb_ms_block_, rst_block_;
  std::vector<Block<T>> fusion_blocks_;
};

/// Validates (pan, lrms) geometry for the networks; throws ContractError.
void check_geometry(const nn::Shape& pan, const nn::Shape& lrms, std::size_t min_side);

// ---- discriminator --------------------------------------------------------

struct DiscriminatorConfig {
  std::uint64_t seed = 1;
};

inline constexpr std::size_t kDiscChannels[5] = {64, 128, 256, 512, 1};
inline constexpr int kDiscStrides[5] = {2, 2, 2, 1, 1};

/// Conditional patch discriminator on concat(pan, up4(lrms), fused): five 4x4
/// convolutions with padding 1, LeakyReLU(0.2) after the first four and
/// instance norm on layers 2-4.
template <typename T>
class Discriminator {
 public:
  explicit Discriminator(const DiscriminatorConfig& config = {});

  /// Returns the (N, 1, h, w) score map.
  Tensor<T> operator()(const Tensor<T>& pan, const Tensor<T>& lrms, const Tensor<T>& fused) const;

  ParameterSet<T>& params() { return params_; }
  const ParameterSet<T>& params() const { return params_; }

  /// Output side for a square input side: floor((s - 4 + 2) / stride) + 1 per layer.
  static std::size_t output_side(std::size_t input_side);

 private:
  ParameterSet<T> params_;
  std::vector<Conv<T>> layers_;
};

// ---- parameter transfer and checkpoints -----------------------------------

/// Copies values (by name, converting type) from `src` into `dst`. Every
/// parameter of `dst` must exist in `src` with the same shape (ContractError).
template <typename T, typename U>
void copy_values(ParameterSet<T>& dst, const ParameterSet<U>& src) {
  for (auto& p : dst) {
    if (!src.contains(p.name)) throw ContractError("copy_values: missing parameter " + p.name);
    const auto& s = src.get(p.name);
    if (s.shape() != p.tensor.shape()) throw ContractError("copy_values: shape mismatch for " + p.name);
    auto d = p.tensor.mutable_data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<T>(s.data()[i]);
  }
}

using NamedTensors = std::vector<std::pair<std::string, Tensor<float>>>;

/// "UCGK" | u32 version | u32 count | per tensor: u32 name length, name bytes,
/// u32 rank, u32 dims[rank], f32 payload. Little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const std::vector<const ParameterSet<float>*>& sets);
NamedTensors read_checkpoint(const std::filesystem::path& path);

/// Loads every parameter of `dst` from `entries`; FormatError on a missing name or shape mismatch.
void load_parameters(ParameterSet<float>& dst, const NamedTensors& entries);

/// rca if any generator parameter belongs to an attention layer, residual otherwise.
BlockKind infer_block_kind(const NamedTensors& entries);

/// Rebuilds a generator from a checkpoint (block kind inferred).
Generator<float> load_generator(const std::filesystem::path& path,
                                const imaging::FilterSpec& filter = imaging::averaging_filter());

}  // namespace ucgan::net
