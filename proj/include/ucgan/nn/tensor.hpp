#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ucgan/error.hpp"
#include "ucgan/nn/shape.hpp"

namespace ucgan::nn {

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until the first backward pass reaches this node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward;

  bool is_leaf() const { return !backward; }
  std::span<T> ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T{0});
    return grad;
  }
};

}  // namespace detail

/// Whether newly created op results record a graph on this thread.
bool grad_enabled();

/// Disables graph recording for its lifetime (evaluation, detached targets).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Dense N×C×H×W array with optional reverse-mode gradient tracking.
///
/// Copies share the underlying node, so a Tensor behaves like a handle. Values
/// are immutable once an op has produced them; only leaves (parameters,
/// inputs) expose mutable storage, which the optimizer and loaders use.
template <typename T>
class Tensor {
 public:
  using value_type = T;
  using NodeT = detail::Node<T>;
  using BackwardFn = std::function<void(NodeT&)>;

  Tensor() = default;

  explicit Tensor(Shape shape, T fill = T{0}, bool requires_grad = false)
      : node_(std::make_shared<NodeT>()) {
    node_->shape = shape;
    node_->value.assign(shape.numel(), fill);
    node_->requires_grad = requires_grad;
  }

  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false)
      : node_(std::make_shared<NodeT>()) {
    if (values.size() != shape.numel()) {
      throw DimensionError("Tensor: " + std::to_string(values.size()) +
                           " values do not fill shape " + shape.str());
    }
    node_->shape = shape;
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
  }

  static Tensor scalar(T v, bool requires_grad = false) {
    return Tensor(Shape{1, 1, 1, 1}, std::vector<T>{v}, requires_grad);
  }

  /// Builds an op output. Records `backward` only when grad mode is on and at
  /// least one input requires grad.
  static Tensor from_op(Shape shape, std::vector<T> values,
                        std::initializer_list<Tensor> inputs, BackwardFn backward) {
    Tensor out(shape, std::move(values));
    if (!grad_enabled()) return out;
    bool any = false;
    for (const auto& t : inputs) any = any || (t.defined() && t.requires_grad());
    if (!any) return out;
    out.node_->requires_grad = true;
    for (const auto& t : inputs) out.node_->parents.push_back(t.node_);
    out.node_->backward = std::move(backward);
    return out;
  }

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node().shape; }
  std::size_t numel() const { return node().value.size(); }
  std::span<const T> data() const { return node().value; }

  /// Writable storage; only permitted on leaves.
  std::span<T> mutable_data() {
    if (!node().is_leaf()) throw ContractError("Tensor: cannot mutate an op result");
    return node_->value;
  }

  T item() const {
    if (numel() != 1) throw DimensionError("Tensor::item on shape " + shape().str());
    return node_->value[0];
  }
  T at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return node().value[shape().offset(n, c, h, w)];
  }

  bool requires_grad() const { return node().requires_grad; }
  void set_requires_grad(bool flag) {
    if (!node().is_leaf()) throw ContractError("Tensor: requires_grad is fixed on op results");
    node_->requires_grad = flag;
  }
  bool has_grad() const { return node().grad.size() == node().value.size(); }
  std::span<const T> grad() const {
    if (!has_grad()) throw ContractError("Tensor: gradient not populated");
    return node_->grad;
  }
  std::span<T> mutable_grad() { return node().ensure_grad(); }
  void zero_grad() { node().grad.clear(); }

  /// Leaf copy of the values, disconnected from the graph.
  Tensor detach() const { return Tensor(shape(), node().value); }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(node().value.begin(), node().value.end());
    return Tensor<U>(shape(), std::move(out));
  }

  NodeT& node() const {
    if (!node_) throw ContractError("Tensor: use of undefined tensor");
    return *node_;
  }
  const std::shared_ptr<NodeT>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<NodeT> node_;
};

/// Reverse-mode pass from a scalar loss. Leaf grads accumulate across calls;
/// intermediate grads are recomputed each call.
template <typename T>
void backward(const Tensor<T>& loss);

extern template void backward<float>(const Tensor<float>&);
extern template void backward<double>(const Tensor<double>&);

}  // namespace ucgan::nn
