#include "remaster/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "remaster/errors.hpp"

namespace remaster {

namespace {
thread_local bool g_record_grad = true;
}

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw DimensionError("rank", "negative dimension in shape " + shape_to_string(shape));
    n *= d;
  }
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

const char* axis5_name(int axis) {
  static const char* names[] = {"batch", "channels", "time", "height", "width"};
  return axis >= 0 && axis < 5 ? names[axis] : "rank";
}

std::vector<float>& detail::Node::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0f);
  return grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0f, requires_grad); }

Tensor Tensor::full(Shape shape, float value, bool requires_grad) {
  const auto n = static_cast<std::size_t>(shape_numel(shape));
  return from_data(std::move(shape), std::vector<float>(n, value), requires_grad);
}

Tensor Tensor::from_data(Shape shape, std::vector<float> data, bool requires_grad) {
  if (static_cast<std::int64_t>(data.size()) != shape_numel(shape)) {
    throw DimensionError("rank", "data length " + std::to_string(data.size()) +
                                     " does not match shape " + shape_to_string(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(float value, bool requires_grad) { return from_data({1}, {value}, requires_grad); }

detail::Node& Tensor::node() const {
  if (!node_) throw AutogradError("use of undefined tensor");
  return *node_;
}

const Shape& Tensor::shape() const { return node().shape; }

std::int64_t Tensor::dim(int axis) const {
  const auto& s = shape();
  if (axis < 0 || axis >= static_cast<int>(s.size())) {
    throw DimensionError("rank", "axis " + std::to_string(axis) + " out of range for shape " + shape_to_string(s));
  }
  return s[static_cast<std::size_t>(axis)];
}

std::int64_t Tensor::numel() const { return static_cast<std::int64_t>(node().data.size()); }

std::span<const float> Tensor::data() const { return node().data; }
std::span<float> Tensor::mutable_data() { return node().data; }

float Tensor::item() const {
  if (numel() != 1) throw DimensionError("rank", "item() on tensor of shape " + shape_to_string(shape()));
  return node().data[0];
}

float Tensor::at(std::initializer_list<std::int64_t> index) const {
  const auto& s = shape();
  if (index.size() != s.size()) throw DimensionError("rank", "index rank mismatch");
  std::int64_t off = 0;
  std::size_t i = 0;
  for (auto v : index) {
    if (v < 0 || v >= s[i]) throw DimensionError(i < 5 ? axis5_name(static_cast<int>(i)) : "rank", "index out of range");
    off = off * s[i] + v;
    ++i;
  }
  return node().data[static_cast<std::size_t>(off)];
}

bool Tensor::requires_grad() const { return node().requires_grad; }

void Tensor::set_requires_grad(bool value) {
  if (!node().is_leaf) throw AutogradError("requires_grad can only be changed on leaves");
  node().requires_grad = value;
}

bool Tensor::has_grad() const { return !node().grad.empty(); }

std::span<const float> Tensor::grad() const { return node().grad; }

std::span<float> Tensor::mutable_grad() { return node().ensure_grad(); }

void Tensor::zero_grad() { node().grad.clear(); }

Tensor Tensor::detach() const {
  auto n = std::make_shared<detail::Node>();
  n->shape = shape();
  n->data = node().data;
  return Tensor(std::move(n));
}

Tensor Tensor::clone() const { return detach(); }

Tensor Tensor::make_result(Shape shape, std::vector<float> data, std::vector<Tensor> parents,
                           std::function<void(detail::Node&)> backward_fn) {
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->is_leaf = false;
  bool needs = false;
  if (g_record_grad) {
    for (const auto& p : parents) needs = needs || p.node().requires_grad;
  }
  if (needs) {
    n->requires_grad = true;
    for (auto& p : parents) n->parents.push_back(p.node_);
    n->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(n));
}

void Tensor::backward() {
  auto& root = node();
  if (root.data.size() != 1) throw AutogradError("backward() requires a scalar, got " + shape_to_string(root.shape));
  if (!root.requires_grad) throw AutogradError("backward() on a tensor that is not part of a recorded graph");

  // Iterative post-order DFS gives a topological order. The order holds
  // owning pointers because releasing a node's tape may drop the last other
  // reference to its parents.
  std::vector<std::shared_ptr<detail::Node>> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<std::shared_ptr<detail::Node>, std::size_t>> stack{{node_, 0}};
  visited.insert(&root);
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.second < top.first->parents.size()) {
      std::shared_ptr<detail::Node> p = top.first->parents[top.second++];
      if (p->requires_grad && visited.insert(p.get()).second) stack.emplace_back(std::move(p), 0);
    } else {
      order.push_back(std::move(top.first));
      stack.pop_back();
    }
  }

  root.ensure_grad()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = it->get();
    if (n->is_leaf) continue;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
    n->backward_fn = nullptr;
    n->parents.clear();
    // Intermediate gradients are not needed once propagated.
    std::vector<float>().swap(n->grad);
    it->reset();
  }
}

NoGradGuard::NoGradGuard() : previous_(g_record_grad) { g_record_grad = false; }
NoGradGuard::~NoGradGuard() { g_record_grad = previous_; }

bool grad_recording_enabled() { return g_record_grad; }

void check_finite(const Tensor& t, const char* where) {
  for (float v : t.data()) {
    if (!std::isfinite(v)) throw NonFiniteError(std::string("non-finite value in ") + where);
  }
}

}  // namespace remaster
