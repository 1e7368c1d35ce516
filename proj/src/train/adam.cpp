#include <cmath>

#include "ucgan/error.hpp"
#include "ucgan/train/train.hpp"

namespace ucgan::train {

template <typename T>
Adam<T>::Adam(nn::ParameterSet<T>& params, const AdamConfig& config) : params_(&params), config_(config) {
  if (!(config.learning_rate > 0.0)) throw ContractError("adam: learning rate must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw ContractError("adam: betas must lie in [0, 1)");
  }
  if (!(config.eps > 0.0)) throw ContractError("adam: eps must be positive");
  for (const auto& p : params) {
    m_.emplace_back(p.tensor.numel(), 0.0);
    v_.emplace_back(p.tensor.numel(), 0.0);
  }
}

template <typename T>
void Adam<T>::step() {
  if (m_.size() != params_->size()) throw ContractError("adam: parameter set changed after construction");
  for (const auto& p : *params_) {
    if (!p.tensor.has_grad()) throw ContractError("adam: parameter " + p.name + " has no gradient");
  }
  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  std::size_t index = 0;
  for (auto& p : *params_) {
    auto& m = m_[index];
    auto& v = v_[index];
    ++index;
    const auto g = p.tensor.grad();
    auto theta = p.tensor.mutable_data();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] = static_cast<T>(static_cast<double>(theta[i]) -
                                config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace ucgan::train
