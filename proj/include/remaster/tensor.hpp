#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace remaster {

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Axis names of the 5-D feature layout used throughout the networks.
enum Axis5 : int { kBatch = 0, kChannel = 1, kTime = 2, kHeight = 3, kWidth = 4 };
const char* axis5_name(int axis);

namespace detail {

struct Node {
  Shape shape;
  std::vector<float> data;
  std::vector<float> grad;  // empty until a gradient arrives
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents' grads.
  std::function<void(Node&)> backward_fn;

  std::vector<float>& ensure_grad();
};

}  // namespace detail

/// Dense float32 tensor participating in a reverse-mode tape.
///
/// Copies share storage. The networks use rank 5 in (B, C, T, H, W) order;
/// the attention matrices use rank 3 (B, rows, cols). Tensors produced by an
/// op record their parents while gradient recording is enabled (see
/// NoGradGuard) and at least one parent requires a gradient.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<float> data, bool requires_grad = false);
  static Tensor scalar(float value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::int64_t dim(int axis) const;
  int rank() const { return static_cast<int>(shape().size()); }
  std::int64_t numel() const;

  std::span<const float> data() const;
  /// Direct write access; intended for parameter initialisation and optimizer
  /// updates on leaves, never on recorded intermediates.
  std::span<float> mutable_data();
  float item() const;
  float at(std::initializer_list<std::int64_t> index) const;

  bool requires_grad() const;
  void set_requires_grad(bool value);
  bool has_grad() const;
  std::span<const float> grad() const;
  std::span<float> mutable_grad();
  void zero_grad();

  /// Reverse sweep from this scalar. Leaves accumulate into grad(); the
  /// recorded graph behind this tensor is released afterwards.
  void backward();

  /// Same values, no history, no gradient.
  Tensor detach() const;
  /// Deep copy of values (no history).
  Tensor clone() const;

  bool same_storage(const Tensor& other) const { return node_ == other.node_; }

  // Used by op implementations.
  static Tensor make_result(Shape shape, std::vector<float> data,
                            std::vector<Tensor> parents,
                            std::function<void(detail::Node&)> backward_fn);
  detail::Node& node() const;
  std::shared_ptr<detail::Node> node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

/// Disables graph recording on this thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_recording_enabled();

/// Throws NonFiniteError naming `where` if any value is NaN or infinite.
void check_finite(const Tensor& t, const char* where);

}  // namespace remaster
