#include "ucgan/losses/losses.hpp"

#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/nn/ops.hpp"

namespace ucgan::losses {

template <typename T>
CyclePass<T> cycle_pass(const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms) {
  CyclePass<T> p;
  p.f1 = g(pan, lrms);
  p.f1_down = imaging::bicubic_resize(p.f1, imaging::kDownsample4);
  p.f2 = g(pan, p.f1_down);
  return p;
}

template <typename T>
Tensor<T> cycle_loss(const CyclePass<T>& pass) {
  return nn::l1_mean(pass.f1, pass.f2);
}

template <typename T>
Tensor<T> cycle_loss(const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms) {
  return cycle_loss(cycle_pass(g, pan, lrms));
}

template <typename T>
Tensor<T> adv_loss_g(const CriticFn<T>& d, const Tensor<T>& pan, const CyclePass<T>& pass) {
  return nn::sq_mean(d(pan, pass.f1_down, pass.f2), T(1));
}

template <typename T>
Tensor<T> adv_loss_g(const CriticFn<T>& d, const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms) {
  return adv_loss_g(d, pan, cycle_pass(g, pan, lrms));
}

void SoftLabelConfig::validate() const {
  auto in_range = [](double v) { return v >= 0.0 && v <= 1.2; };
  if (!(a_min <= a_max && b_min <= b_max)) throw ContractError("soft labels: range bounds out of order");
  if (!(in_range(a_min) && in_range(a_max) && in_range(b_min) && in_range(b_max))) {
    throw ContractError("soft labels: ranges must lie within [0, 1.2]");
  }
  if (!(a_min > b_max)) throw ContractError("soft labels: real range must lie above the fake range");
}

SoftLabels draw_labels(const SoftLabelConfig& config, std::mt19937_64& rng) {
  SoftLabels l;
  l.a = std::uniform_real_distribution<double>(config.a_min, config.a_max)(rng);
  l.b = std::uniform_real_distribution<double>(config.b_min, config.b_max)(rng);
  return l;
}

template <typename T>
Tensor<T> adv_loss_d(const CriticFn<T>& d, const Tensor<T>& pan, const Tensor<T>& lrms, const CyclePass<T>& pass,
                     SoftLabels labels) {
  const auto p = pass.detached();
  const auto real = nn::sq_mean(d(pan, lrms, p.f1), static_cast<T>(labels.a));
  const auto fake = nn::sq_mean(d(pan, p.f1_down, p.f2), static_cast<T>(labels.b));
  return nn::add(real, fake);
}

template <typename T>
Tensor<T> adv_loss_d(const CriticFn<T>& d, const FuseFn<T>& g, const Tensor<T>& pan, const Tensor<T>& lrms,
                     const SoftLabelConfig& config, std::mt19937_64& rng) {
  CyclePass<T> pass;
  {
    nn::NoGradGuard no_grad;
    pass = cycle_pass(g, pan, lrms);
  }
  return adv_loss_d(d, pan, lrms, pass, draw_labels(config, rng));
}

std::string to_string(Pooling pooling) { return pooling == Pooling::max ? "max" : "avg"; }

Pooling parse_pooling(const std::string& text) {
  if (text == "max") return Pooling::max;
  if (text == "avg") return Pooling::avg;
  throw ContractError("unknown pooling '" + text + "' (expected max or avg)");
}

template <typename T>
Tensor<T> spatial_loss(const Tensor<T>& pan, const Tensor<T>& fused, const imaging::FilterSpec& filter,
                       Pooling pooling) {
  const auto hp = imaging::high_pass(fused, filter);
  const auto pooled = pooling == Pooling::max ? nn::channel_max(hp) : nn::channel_mean(hp);
  return nn::l1_mean(imaging::high_pass(pan, filter), pooled);
}

template <typename T>
Tensor<T> spectral_loss(const Tensor<T>& lrms, const Tensor<T>& fused, const imaging::FilterSpec& filter) {
  return nn::l1_mean(imaging::low_pass(lrms, filter),
                     imaging::low_pass(imaging::bicubic_resize(fused, imaging::kDownsample4), filter));
}

template <typename T>
Tensor<T> nrf_loss(const Tensor<T>& pan, const Tensor<T>& lrms, const Tensor<T>& fused, const Tensor<T>& pan_lr,
                   const metrics::QnrParams& params) {
  Tensor<T> low = pan_lr;
  if (!low.defined()) {
    nn::NoGradGuard no_grad;
    low = imaging::degrade(pan);
  }
  const auto q = metrics::qnr_tensor(fused, lrms, pan, low, params);
  return nn::add_scalar(nn::scale(nn::mean(q), T(-1)), T(1));
}

std::string to_string(Term term) {
  switch (term) {
    case Term::cyc: return "cyc";
    case Term::adv: return "adv";
    case Term::rec: return "rec";
    case Term::nrf: return "nrf";
  }
  return "?";
}

Term parse_term(const std::string& text) {
  for (Term t : kAllTerms)
    if (to_string(t) == text) return t;
  throw ContractError("unknown loss term '" + text + "' (expected cyc, adv, rec or nrf)");
}

double LossWeights::weight(Term t) const {
  switch (t) {
    case Term::cyc: return cyc;
    case Term::adv: return adv;
    case Term::rec: return rec;
    case Term::nrf: return nrf;
  }
  return 0.0;
}

bool LossWeights::enabled(Term t) const {
  switch (t) {
    case Term::cyc: return use_cyc;
    case Term::adv: return use_adv;
    case Term::rec: return use_rec;
    case Term::nrf: return use_nrf;
  }
  return false;
}

void LossWeights::set_enabled(Term t, bool on) {
  switch (t) {
    case Term::cyc: use_cyc = on; break;
    case Term::adv: use_adv = on; break;
    case Term::rec: use_rec = on; break;
    case Term::nrf: use_nrf = on; break;
  }
}

void LossWeights::set_weight(Term t, double w) {
  switch (t) {
    case Term::cyc: cyc = w; break;
    case Term::adv: adv = w; break;
    case Term::rec: rec = w; break;
    case Term::nrf: nrf = w; break;
  }
}

void LossWeights::validate() const {
  bool any = false;
  for (Term t : kAllTerms) {
    if (weight(t) < 0.0) throw ContractError("loss weight for " + to_string(t) + " is negative");
    any = any || enabled(t);
  }
  if (!any) throw ContractError("every loss term is disabled");
}

template <typename T>
const Tensor<T>& LossComponents<T>::get(Term t) const {
  switch (t) {
    case Term::cyc: return cyc;
    case Term::adv: return adv;
    case Term::rec: return rec;
    case Term::nrf: return nrf;
  }
  return cyc;
}

template <typename T>
Tensor<T> total_g_loss(const LossWeights& weights, const LossComponents<T>& components) {
  weights.validate();
  Tensor<T> total;
  for (Term t : kAllTerms) {
    if (!weights.enabled(t)) continue;
    const auto& c = components.get(t);
    if (!c.defined()) throw ContractError("total_g_loss: enabled term " + to_string(t) + " was not computed");
    const auto term = nn::scale(c, static_cast<T>(weights.weight(t)));
    total = total.defined() ? nn::add(total, term) : term;
  }
  return total;
}

#define UCGAN_INSTANTIATE_LOSSES(T)                                                                           \
  template CyclePass<T> cycle_pass<T>(const FuseFn<T>&, const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> cycle_loss<T>(const CyclePass<T>&);                                                      \
  template Tensor<T> cycle_loss<T>(const FuseFn<T>&, const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> adv_loss_g<T>(const CriticFn<T>&, const Tensor<T>&, const CyclePass<T>&);                \
  template Tensor<T> adv_loss_g<T>(const CriticFn<T>&, const FuseFn<T>&, const Tensor<T>&, const Tensor<T>&); \
  template Tensor<T> adv_loss_d<T>(const CriticFn<T>&, const Tensor<T>&, const Tensor<T>&, const CyclePass<T>&, \
                                   SoftLabels);                                                               \
  template Tensor<T> adv_loss_d<T>(const CriticFn<T>&, const FuseFn<T>&, const Tensor<T>&, const Tensor<T>&,  \
                                   const SoftLabelConfig&, std::mt19937_64&);                                 \
  template Tensor<T> spatial_loss<T>(const Tensor<T>&, const Tensor<T>&, const imaging::FilterSpec&, Pooling); \
  template Tensor<T> spectral_loss<T>(const Tensor<T>&, const Tensor<T>&, const imaging::FilterSpec&);        \
  template Tensor<T> nrf_loss<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,      \
                                 const metrics::QnrParams&);                                                  \
  template struct LossComponents<T>;                                                                          \
  template Tensor<T> total_g_loss<T>(const LossWeights&, const LossComponents<T>&);

UCGAN_INSTANTIATE_LOSSES(float)
UCGAN_INSTANTIATE_LOSSES(double)

}  // namespace ucgan::losses
