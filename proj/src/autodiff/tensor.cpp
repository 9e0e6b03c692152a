#include "nmt/autodiff/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace nmt::ad {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

ShapeError::ShapeError(const std::string& op, const Shape& a, const Shape& b)
    : std::invalid_argument(op + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b)) {}

namespace {

std::shared_ptr<detail::Node> make_leaf(Shape shape, std::vector<double> values, bool rg) {
  for (auto d : shape)
    if (d == 0) throw ShapeError("tensor: zero-sized dimension in " + shape_str(shape));
  if (values.size() != shape_numel(shape))
    throw ShapeError("tensor: " + std::to_string(values.size()) + " values for shape " +
                     shape_str(shape));
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  n->requires_grad = rg;
  return n;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto n = shape_numel(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0), requires_grad));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  auto n = shape_numel(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values, bool requires_grad) {
  return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(make_leaf({}, {value}, requires_grad));
}

std::size_t Tensor::rows() const {
  if (dim() != 2) throw ShapeError("rows: expected 2-D tensor, got " + shape_str(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (dim() != 2) throw ShapeError("cols: expected 2-D tensor, got " + shape_str(shape()));
  return shape()[1];
}

std::span<double> Tensor::mutable_values() {
  if (!is_leaf()) throw GraphError("mutable_values: tensor produced by '" + op_name() + "'");
  return node_->value;
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item: tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

double Tensor::at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

void Tensor::set_requires_grad(bool on) {
  if (!is_leaf()) throw GraphError("set_requires_grad on non-leaf '" + op_name() + "'");
  node_->requires_grad = on;
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw GraphError("grad: no gradient stored");
  return node_->grad;
}

void Tensor::zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

Tensor Tensor::detach() const { return from_values(shape(), node_->value, false); }

void Tensor::backward() const {
  if (numel() != 1)
    throw ShapeError("backward: loss must be scalar, got " + shape_str(shape()));
  if (node_->released) throw GraphError("backward: graph already released by a previous call");
  if (!node_->requires_grad) throw GraphError("backward: loss does not require grad");

  // Iterative post-order DFS; reversed it is a topological order from the loss.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      detail::Node* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  for (auto* n : order)
    if (n->grad.empty()) n->grad.assign(n->value.size(), 0.0);
  node_->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->is_leaf()) continue;
    if (n->released) throw GraphError("backward: reached a node released by a previous call");
    n->backward_fn(*n);
  }

  for (auto* n : order) {
    if (n->is_leaf()) {
      for (double g : n->grad)
        if (!std::isfinite(g)) throw NonFiniteError("backward: non-finite gradient on leaf");
      continue;
    }
    n->grad.clear();
    n->grad.shrink_to_fit();
    n->parents.clear();
    n->backward_fn = nullptr;
    n->released = true;
  }
}

}  // namespace nmt::ad
