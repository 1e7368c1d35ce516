#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucgan/baselines/baselines.hpp"
#include "ucgan/data/dataset.hpp"
#include "ucgan/losses/losses.hpp"
#include "ucgan/metrics/report.hpp"
#include "ucgan/net/net.hpp"

namespace ucgan::train {

// ---- optimizer ------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moments are kept in double, one buffer per parameter.
template <typename T>
class Adam {
 public:
  Adam(nn::ParameterSet<T>& params, const AdamConfig& config);

  /// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps). Throws ContractError if
  /// any parameter lacks a gradient.
  void step();

  std::uint64_t steps() const { return step_; }
  const std::vector<double>& first_moment(std::size_t index) const { return m_[index]; }
  const std::vector<double>& second_moment(std::size_t index) const { return v_[index]; }

 private:
  nn::ParameterSet<T>* params_;
  AdamConfig config_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// ---- configuration --------------------------------------------------------

struct TrainConfig {
  std::size_t batch_size = 8;
  double learning_rate = 1e-4;
  std::size_t epochs = 20;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  losses::LossWeights loss_weights;
  losses::SoftLabelConfig soft_labels;
  net::BlockKind block_kind = net::BlockKind::rca;
  losses::Pooling pooling_kind = losses::Pooling::max;
  std::uint64_t seed = 0;
  /// Write a checkpoint every this many iterations (0: only the final one).
  std::size_t checkpoint_every = 0;
  /// Trailing dataset pairs held out for the per-epoch QNR check.
  std::size_t holdout = 8;
  /// Stop after this many iterations (0: run `epochs` full epochs).
  std::size_t max_iterations = 0;

  /// batch_size >= 1, learning_rate > 0, epochs >= 1, plus weight and label checks.
  void validate() const;
  AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_eps}; }

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys raise ContractError.
  static TrainConfig from_json(const nlohmann::json& j);
};

TrainConfig load_train_config(const std::filesystem::path& path);

struct NamedWeights {
  std::string name;
  losses::LossWeights weights;
};

/// Loss-term ablation grid: the four leave-one-out runs ("no_cyc", ...) and the
/// four single-term runs ("only_cyc", ...), all at default weights.
std::vector<NamedWeights> loss_ablation_grid();

/// Weight sensitivity grid: each lambda at 0.1x, 1x and 10x its default with the
/// others at default (duplicates of the default setting removed; the default is first).
std::vector<NamedWeights> weight_sweep_grid();

// ---- training ---------------------------------------------------------------

struct IterationLog {
  std::size_t iteration = 0;
  std::size_t epoch = 0;
  std::optional<double> cyc, adv, rec, spatial, spectral, nrf;
  double g_total = 0.0;
  std::optional<double> d_loss;

  nlohmann::json to_json() const;
};

struct EpochEval {
  std::size_t epoch = 0;
  std::size_t iteration = 0;
  double qnr = 0.0;
};

struct TrainOutputs {
  std::filesystem::path log_path;        // JSON lines; empty disables the log file
  std::filesystem::path checkpoint_dir;  // empty disables checkpoints
  std::function<void(const IterationLog&)> on_iteration;
  std::function<void(const EpochEval&)> on_eval;
};

struct TrainResult {
  std::vector<IterationLog> log;
  std::vector<EpochEval> evals;  // evals.front() is the step-0 value
  net::Generator<float> generator;
  net::Discriminator<float> discriminator;

  /// ContractError when no pairs were held out.
  double initial_qnr() const;
  double final_qnr() const;
};

/// Alternating training: per iteration one discriminator update (skipped when
/// the adversarial term is disabled) followed by one generator update. The
/// last `config.holdout` pairs are held out for QNR evaluation at step 0 and
/// after every epoch. Every pair must come without a reference image. A NaN in
/// any loss raises TrainingError naming the term and the iteration.
TrainResult train(const TrainConfig& config, const std::vector<data::ScenePair>& dataset,
                  const TrainOutputs& outputs = {});

/// Generator matching the config's block kind and seed, with the zero-initialized output conv.
net::Generator<float> make_generator(const TrainConfig& config);
net::Discriminator<float> make_discriminator(const TrainConfig& config);

/// Batch tensors of a set of pairs, raw digital numbers as float.
struct Batch {
  nn::Tensor<float> pan;     // (N, 1, H, W)
  nn::Tensor<float> lrms;    // (N, 4, H/4, W/4)
  nn::Tensor<float> pan_lr;  // Wald-degraded PAN, (N, 1, H/4, W/4)
};
Batch make_batch(const std::vector<const data::ScenePair*>& pairs);

/// Generator loss terms of one batch; terms disabled in `weights` are left
/// undefined. `pass` must come from the same generator.
losses::LossComponents<float> generator_terms(const losses::CyclePass<float>& pass, const Batch& batch,
                                              const net::Discriminator<float>& d, const losses::LossWeights& weights,
                                              losses::Pooling pooling,
                                              const imaging::FilterSpec& filter = imaging::averaging_filter());

// ---- inference and evaluation ------------------------------------------------

/// Runs the generator on one pair and rounds to the MS bit depth.
imaging::RasterImage pansharpen(const net::Generator<float>& g, const imaging::RasterImage& pan,
                                const imaging::RasterImage& lrms);

/// Checkpoint + MSR inputs -> fused MSR (and an RGB PNG when `png_path` is set).
void pansharpen_files(const std::filesystem::path& checkpoint, const std::filesystem::path& pan_path,
                      const std::filesystem::path& ms_path, const std::filesystem::path& out_path,
                      const std::filesystem::path& png_path = {});

using FuseMethod = std::function<imaging::RasterImage(const data::ScenePair&)>;

FuseMethod generator_method(const net::Generator<float>& g);
FuseMethod baseline_method(baselines::BaselineKind kind);
/// Bicubic x4 upsampling of the LR MS.
FuseMethod bicubic_method();
/// Returns the pair's reference (Wald mode sanity check).
FuseMethod reference_method();

/// Metrics of one fused image. Reference metrics are filled when `with_reference` is set.
metrics::PairMetrics evaluate_pair(const imaging::RasterImage& fused, const data::ScenePair& pair,
                                   bool with_reference, const metrics::QnrParams& params = {});

/// Non-reference metrics for every pair; reference metrics too in Wald mode
/// (ContractError if a pair lacks its reference).
metrics::MetricReport evaluate(const std::string& method, const FuseMethod& fuse,
                               const std::vector<data::ScenePair>& pairs, data::Mode mode,
                               const metrics::QnrParams& params = {});

// ---- gradient checks ----------------------------------------------------------

struct GradSuiteEntry {
  std::string name;
  double relative_error = 0.0;
  double tolerance = 1e-3;
  bool passed() const { return relative_error < tolerance; }
};

/// Central finite-difference checks, in double precision, of every loss term
/// (and the weighted total for both block kinds) with respect to the network
/// parameters on a random 24x24 toy scene. The generator's output conv is
/// randomly initialized so gradients reach every layer.
std::vector<GradSuiteEntry> loss_gradient_suite(std::uint64_t seed = 0);

}  // namespace ucgan::train
