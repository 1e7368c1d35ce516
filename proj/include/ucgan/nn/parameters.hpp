#pragma once

#include <string>
#include <vector>

#include "ucgan/nn/tensor.hpp"

namespace ucgan::nn {

/// Trainable leaf tensor with a hierarchical name such as "G.emb_pan.conv1.weight".
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> tensor;
};

/// Ordered collection of uniquely named parameters. Insertion order is the
/// serialization and optimizer order.
template <typename T>
class ParameterSet {
 public:
  /// Registers `tensor` (marking it requires_grad) and returns the handle.
  Tensor<T> add(std::string name, Tensor<T> tensor);

  const Tensor<T>& get(const std::string& name) const;
  Tensor<T>& get(const std::string& name);
  bool contains(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();

 private:
  std::vector<Parameter<T>> params_;
};

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;

}  // namespace ucgan::nn
