#pragma once

#include <functional>
#include <random>
#include <string>

#include "ucgan/imaging/filters.hpp"
#include "ucgan/metrics/metrics.hpp"
#include "ucgan/nn/tensor.hpp"

namespace ucgan::losses {

using nn::Tensor;

/// G(pan, lrms) -> fused.
template <typename T>
using FuseFn = std::function<Tensor<T>(const Tensor<T>& pan, const Tensor<T>& lrms)>;
/// D(pan, lrms, fused) -> score map.
template <typename T>
using CriticFn = std::function<Tensor<T>(const Tensor<T>& pan, const Tensor<T>& lrms, const Tensor<T>& fused)>;

/// F1 = G(lrms, pan), F1_down = bicubic x1/4 of F1, F2 = G(F1_down, pan).
template <typename T>
struct CyclePass {
  Tensor<T> f1;
  Tensor<T> f1_down;
  Tensor<T> f2;

  /// Copies with every tensor detached from the graph.
  CyclePass detached() const { return {f1.detach(), f1_down.detach(), f2.detach()}; }
};

template <typename T>
CyclePass<T> cycle_pass(const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms);

/// l1_mean(F1, F2); gradients flow through both generator applications.
template <typename T>
Tensor<T> cycle_loss(const CyclePass<T>& pass);
template <typename T>
Tensor<T> cycle_loss(const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms);

/// sq_mean(D(pan, F1_down, F2), 1).
template <typename T>
Tensor<T> adv_loss_g(const CriticFn<T>& d, const Tensor<T>& pan, const CyclePass<T>& pass);
template <typename T>
Tensor<T> adv_loss_g(const CriticFn<T>& d, const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms);

struct SoftLabelConfig {
  double a_min = 0.7, a_max = 1.2;  // real target
  double b_min = 0.0, b_max = 0.3;  // fake target

  /// Ranges ordered, within [0, 1.2], and the real range above the fake range.
  void validate() const;
};

struct SoftLabels {
  double a = 1.0;
  double b = 0.0;
};

/// a ~ U[a_min, a_max], then b ~ U[b_min, b_max].
SoftLabels draw_labels(const SoftLabelConfig& config, std::mt19937_64& rng);

/// sq_mean(D(pan, lrms, F1), a) + sq_mean(D(pan, F1_down, F2), b). The cycle
/// tensors are detached, so no gradient reaches the generator.
template <typename T>
Tensor<T> adv_loss_d(const CriticFn<T>& d, const Tensor<T>& pan, const Tensor<T>& lrms, const CyclePass<T>& pass,
                     SoftLabels labels);
template <typename T>
Tensor<T> adv_loss_d(const CriticFn<T>& d, const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms,
                     const SoftLabelConfig& config, std::mt19937_64& rng);

enum class Pooling { max, avg };

std::string to_string(Pooling pooling);
/// Accepts "max" and "avg".
Pooling parse_pooling(const std::string& text);

/// l1_mean(high_pass(pan), pool_c(high_pass(fused))) with pool_c the per-pixel
/// max (or mean) over the fused channels.
template <typename T>
Tensor<T> spatial_loss(const Tensor<T>& pan, const Tensor<T>& fused, const imaging::FilterSpec& filter,
                       Pooling pooling = Pooling::max);

/// l1_mean(low_pass(lrms), low_pass(bicubic x1/4 of fused)).
template <typename T>
Tensor<T> spectral_loss(const Tensor<T>& lrms, const Tensor<T>& fused, const imaging::FilterSpec& filter);

/// 1 - mean over the batch of per-item QNR. `pan_lr` defaults to the Wald
/// degradation of `pan`.
template <typename T>
Tensor<T> nrf_loss(const Tensor<T>& pan, const Tensor<T>& lrms, const Tensor<T>& fused, const Tensor<T>& pan_lr = {},
                   const metrics::QnrParams& params = {});

enum class Term { cyc, adv, rec, nrf };
inline constexpr Term kAllTerms[4] = {Term::cyc, Term::adv, Term::rec, Term::nrf};

std::string to_string(Term term);
/// Accepts "cyc", "adv", "rec", "nrf".
Term parse_term(const std::string& text);

struct LossWeights {
  double cyc = 1e-3;
  double adv = 1e-3;
  double rec = 5e-4;
  double nrf = 1.0;
  bool use_cyc = true;
  bool use_adv = true;
  bool use_rec = true;
  bool use_nrf = true;

  double weight(Term t) const;
  bool enabled(Term t) const;
  void set_enabled(Term t, bool on);
  void set_weight(Term t, double w);
  /// Weights non-negative and at least one term enabled (ContractError).
  void validate() const;
};

/// Per-term scalar losses; a disabled term may be left undefined.
template <typename T>
struct LossComponents {
  Tensor<T> cyc;
  Tensor<T> adv;
  Tensor<T> rec;  // spatial + spectral
  Tensor<T> nrf;

  const Tensor<T>& get(Term t) const;
};

/// Sum of weight * term over enabled terms. ContractError when every term is
/// disabled or an enabled term is missing.
template <typename T>
Tensor<T> total_g_loss(const LossWeights& weights, const LossComponents<T>& components);

}  // namespace ucgan::losses
