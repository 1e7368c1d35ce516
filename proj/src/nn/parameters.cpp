#include "ucgan/nn/parameters.hpp"

#include <algorithm>

namespace ucgan::nn {

template <typename T>
Tensor<T> ParameterSet<T>::add(std::string name, Tensor<T> tensor) {
  if (contains(name)) throw ContractError("ParameterSet: duplicate parameter name '" + name + "'");
  tensor.set_requires_grad(true);
  params_.push_back({std::move(name), tensor});
  return tensor;
}

template <typename T>
bool ParameterSet<T>::contains(const std::string& name) const {
  return std::any_of(params_.begin(), params_.end(), [&](const auto& p) { return p.name == name; });
}

template <typename T>
const Tensor<T>& ParameterSet<T>::get(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return p.tensor;
  throw ContractError("ParameterSet: no parameter named '" + name + "'");
}

template <typename T>
Tensor<T>& ParameterSet<T>::get(const std::string& name) {
  for (auto& p : params_)
    if (p.name == name) return p.tensor;
  throw ContractError("ParameterSet: no parameter named '" + name + "'");
}

template <typename T>
std::size_t ParameterSet<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.numel();
  return n;
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template class ParameterSet<float>;
template class ParameterSet<double>;

}  // namespace ucgan::nn
