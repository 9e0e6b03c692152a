#include "nmt/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <random>

namespace nmt::ad {

namespace {

using detail::Node;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

Tensor make_result(const char* op, Shape shape, std::vector<double> value,
                   std::initializer_list<const Tensor*> inputs, std::function<void(Node&)> bw) {
  for (double v : value)
    if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + ": non-finite output");
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->op = op;
  bool rg = false;
  for (const Tensor* t : inputs) rg = rg || t->requires_grad();
  if (rg) {
    n->requires_grad = true;
    for (const Tensor* t : inputs) n->parents.push_back(t->node());
    n->backward_fn = std::move(bw);
  }
  return Tensor(std::move(n));
}

Tensor make_result_n(const char* op, Shape shape, std::vector<double> value,
                     std::span<const Tensor> inputs, std::function<void(Node&)> bw) {
  for (double v : value)
    if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + ": non-finite output");
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->op = op;
  bool rg = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (rg) {
    n->requires_grad = true;
    for (const Tensor& t : inputs) n->parents.push_back(t.node());
    n->backward_fn = std::move(bw);
  }
  return Tensor(std::move(n));
}

void require_defined(const char* op, const Tensor& t) {
  if (!t.defined()) throw std::invalid_argument(std::string(op) + ": undefined tensor");
}

enum class Bcast { same, row, scalar };

Bcast broadcast_kind(const char* op, const Tensor& a, const Tensor& b) {
  require_defined(op, a);
  require_defined(op, b);
  if (a.shape() == b.shape()) return Bcast::same;
  if (b.numel() == 1) return Bcast::scalar;
  if (b.dim() == 1 && a.dim() >= 1 && b.shape()[0] == a.shape().back()) return Bcast::row;
  throw ShapeError(op, a.shape(), b.shape());
}

// Calls f(i, j) for every output index i and its broadcast source index j in b.
template <class F>
inline void for_each_pair(Bcast k, std::size_t size, std::size_t width, F&& f) {
  switch (k) {
    case Bcast::same:
      for (std::size_t i = 0; i < size; ++i) f(i, i);
      break;
    case Bcast::row:
      for (std::size_t r = 0, i = 0; r < size / width; ++r)
        for (std::size_t c = 0; c < width; ++c, ++i) f(i, c);
      break;
    case Bcast::scalar:
      for (std::size_t i = 0; i < size; ++i) f(i, std::size_t{0});
      break;
  }
}

// Shared driver for elementwise binary ops: fwd(a, b) -> out, and the local
// partials da(a, b, out), db(a, b, out).
template <class Fwd, class Da, class Db>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, Da da, Db db) {
  const Bcast k = broadcast_kind(op, a, b);
  const std::size_t width = b.numel();
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  for_each_pair(k, av.size(), width, [&](std::size_t i, std::size_t j) { out[i] = fwd(av[i], bv[j]); });
  return make_result(op, a.shape(), std::move(out), {&a, &b}, [k, width, da, db](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    const std::size_t size = n.value.size();
    if (pa.requires_grad)
      for_each_pair(k, size, width, [&](std::size_t i, std::size_t j) {
        pa.grad[i] += n.grad[i] * da(pa.value[i], pb.value[j], n.value[i]);
      });
    if (pb.requires_grad)
      for_each_pair(k, size, width, [&](std::size_t i, std::size_t j) {
        pb.grad[j] += n.grad[i] * db(pa.value[i], pb.value[j], n.value[i]);
      });
  });
}

template <class Fwd, class D>
Tensor unary(const char* op, const Tensor& a, Fwd fwd, D d) {
  require_defined(op, a);
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  return make_result(op, a.shape(), std::move(out), {&a}, [d](Node& n) {
    Node& pa = *n.parents[0];
    for (std::size_t i = 0; i < n.value.size(); ++i)
      pa.grad[i] += n.grad[i] * d(pa.value[i], n.value[i]);
  });
}

// Views a tensor as (outer, last) for last-axis ops.
std::pair<std::size_t, std::size_t> split_last(const char* op, const Tensor& t) {
  if (t.dim() == 0) throw ShapeError(std::string(op) + ": needs at least 1 axis, got []");
  const std::size_t last = t.shape().back();
  return {t.numel() / last, last};
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double out) { return -out / y; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.dim() != 2 || b.dim() != 2 || a.shape()[1] != b.shape()[0])
    throw ShapeError("matmul", a.shape(), b.shape());
  const auto m = static_cast<Eigen::Index>(a.shape()[0]);
  const auto k = static_cast<Eigen::Index>(a.shape()[1]);
  const auto n = static_cast<Eigen::Index>(b.shape()[1]);
  std::vector<double> out(static_cast<std::size_t>(m * n));
  MutMap(out.data(), m, n).noalias() =
      ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), k, n);
  return make_result("matmul", {a.shape()[0], b.shape()[1]}, std::move(out), {&a, &b},
                     [m, k, n](Node& node) {
                       Node& pa = *node.parents[0];
                       Node& pb = *node.parents[1];
                       ConstMap g(node.grad.data(), m, n);
                       if (pa.requires_grad)
                         MutMap(pa.grad.data(), m, k).noalias() +=
                             g * ConstMap(pb.value.data(), k, n).transpose();
                       if (pb.requires_grad)
                         MutMap(pb.grad.data(), k, n).noalias() +=
                             ConstMap(pa.value.data(), m, k).transpose() * g;
                     });
}

Tensor multiply_scalar(const Tensor& a, double c) {
  return unary(
      "multiply_scalar", a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary(
      "add_scalar", a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) { return multiply_scalar(a, -1.0); }

Tensor concat_last_axis(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_last_axis: no inputs");
  for (const auto& p : parts) require_defined("concat_last_axis", p);
  const Shape& ref = parts.front().shape();
  if (ref.empty()) throw ShapeError("concat_last_axis: scalar input");
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != ref.size() || !std::equal(s.begin(), s.end() - 1, ref.begin()))
      throw ShapeError("concat_last_axis", ref, s);
    widths.push_back(s.back());
    total += s.back();
  }
  const std::size_t outer = parts.front().numel() / ref.back();
  std::vector<double> out(outer * total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto v = parts[p].values();
    for (std::size_t r = 0; r < outer; ++r)
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(r * widths[p]), widths[p],
                  out.begin() + static_cast<std::ptrdiff_t>(r * total + offset));
    offset += widths[p];
  }
  Shape shape = ref;
  shape.back() = total;
  return make_result_n("concat_last_axis", std::move(shape), std::move(out), parts,
                       [widths, outer, total](Node& n) {
                         std::size_t off = 0;
                         for (std::size_t p = 0; p < widths.size(); ++p) {
                           Node& pp = *n.parents[p];
                           if (pp.requires_grad)
                             for (std::size_t r = 0; r < outer; ++r)
                               for (std::size_t c = 0; c < widths[p]; ++c)
                                 pp.grad[r * widths[p] + c] += n.grad[r * total + off + c];
                           off += widths[p];
                         }
                       });
}

Tensor concat_last_axis(std::initializer_list<Tensor> parts) {
  return concat_last_axis(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor slice_last_axis(const Tensor& a, std::size_t begin, std::size_t end) {
  require_defined("slice_last_axis", a);
  auto [outer, last] = split_last("slice_last_axis", a);
  if (begin >= end || end > last)
    throw ShapeError("slice_last_axis: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") out of " + shape_str(a.shape()));
  const std::size_t w = end - begin;
  std::vector<double> out(outer * w);
  const auto v = a.values();
  for (std::size_t r = 0; r < outer; ++r)
    for (std::size_t c = 0; c < w; ++c) out[r * w + c] = v[r * last + begin + c];
  Shape shape = a.shape();
  shape.back() = w;
  return make_result("slice_last_axis", std::move(shape), std::move(out), {&a},
                     [outer = outer, last = last, begin, w](Node& n) {
                       Node& pa = *n.parents[0];
                       for (std::size_t r = 0; r < outer; ++r)
                         for (std::size_t c = 0; c < w; ++c)
                           pa.grad[r * last + begin + c] += n.grad[r * w + c];
                     });
}

Tensor relu(const Tensor& a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor square(const Tensor& a) {
  return unary(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor softmax_last_axis(const Tensor& a) {
  require_defined("softmax_last_axis", a);
  auto [outer, last] = split_last("softmax_last_axis", a);
  const auto v = a.values();
  std::vector<double> out(v.size());
  for (std::size_t r = 0; r < outer; ++r) {
    const double* row = v.data() + r * last;
    double* o = out.data() + r * last;
    const double mx = *std::max_element(row, row + last);
    double z = 0.0;
    for (std::size_t c = 0; c < last; ++c) z += (o[c] = std::exp(row[c] - mx));
    for (std::size_t c = 0; c < last; ++c) o[c] /= z;
  }
  return make_result("softmax_last_axis", a.shape(), std::move(out), {&a},
                     [outer = outer, last = last](Node& n) {
                       Node& pa = *n.parents[0];
                       for (std::size_t r = 0; r < outer; ++r) {
                         const double* y = n.value.data() + r * last;
                         const double* g = n.grad.data() + r * last;
                         double dot = 0.0;
                         for (std::size_t c = 0; c < last; ++c) dot += g[c] * y[c];
                         for (std::size_t c = 0; c < last; ++c)
                           pa.grad[r * last + c] += y[c] * (g[c] - dot);
                       }
                     });
}

Tensor sum(const Tensor& a) {
  require_defined("sum", a);
  double s = 0.0;
  for (double x : a.values()) s += x;
  return make_result("sum", {}, {s}, {&a}, [](Node& n) {
    Node& pa = *n.parents[0];
    for (auto& g : pa.grad) g += n.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  require_defined("mean", a);
  double s = 0.0;
  for (double x : a.values()) s += x;
  const double inv = 1.0 / static_cast<double>(a.numel());
  return make_result("mean", {}, {s * inv}, {&a}, [inv](Node& n) {
    Node& pa = *n.parents[0];
    for (auto& g : pa.grad) g += n.grad[0] * inv;
  });
}

Tensor minimum(const Tensor& a, double c) {
  return unary(
      "minimum", a, [c](double x) { return x < c ? x : c; },
      [c](double x, double) { return x < c ? 1.0 : 0.0; });
}

Tensor maximum(const Tensor& a, double c) {
  return unary(
      "maximum", a, [c](double x) { return x > c ? x : c; },
      [c](double x, double) { return x > c ? 1.0 : 0.0; });
}

Tensor gaussian_reparameterize(const Tensor& mean, const Tensor& logvar, Rng& rng) {
  require_defined("gaussian_reparameterize", mean);
  require_defined("gaussian_reparameterize", logvar);
  if (mean.shape() != logvar.shape())
    throw ShapeError("gaussian_reparameterize", mean.shape(), logvar.shape());
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto mu = mean.values();
  const auto lv = logvar.values();
  std::vector<double> eps(mu.size());
  std::vector<double> sigma(mu.size());
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    eps[i] = normal(rng);
    sigma[i] = std::exp(0.5 * lv[i]);
    out[i] = mu[i] + sigma[i] * eps[i];
  }
  return make_result("gaussian_reparameterize", mean.shape(), std::move(out), {&mean, &logvar},
                     [eps = std::move(eps), sigma = std::move(sigma)](Node& n) {
                       Node& pm = *n.parents[0];
                       Node& pl = *n.parents[1];
                       for (std::size_t i = 0; i < n.value.size(); ++i) {
                         if (pm.requires_grad) pm.grad[i] += n.grad[i];
                         if (pl.requires_grad) pl.grad[i] += n.grad[i] * 0.5 * sigma[i] * eps[i];
                       }
                     });
}

std::string_view op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::matmul: return "matmul";
    case OpKind::add: return "add";
    case OpKind::multiply_scalar: return "multiply_scalar";
    case OpKind::concat_last_axis: return "concat_last_axis";
    case OpKind::relu: return "relu";
    case OpKind::tanh: return "tanh";
    case OpKind::exp: return "exp";
    case OpKind::log: return "log";
    case OpKind::softmax_last_axis: return "softmax_last_axis";
    case OpKind::mean: return "mean";
    case OpKind::sum: return "sum";
    case OpKind::elementwise_min_with_scalar: return "elementwise_min_with_scalar";
    case OpKind::gaussian_reparameterize: return "gaussian_reparameterize";
  }
  return "unknown";
}

std::vector<OpKind> all_op_kinds() {
  return {OpKind::matmul, OpKind::add,  OpKind::multiply_scalar,
          OpKind::concat_last_axis, OpKind::relu, OpKind::tanh,
          OpKind::exp, OpKind::log, OpKind::softmax_last_axis,
          OpKind::mean, OpKind::sum, OpKind::elementwise_min_with_scalar,
          OpKind::gaussian_reparameterize};
}

Tensor forward_op(OpKind kind, std::span<const Tensor> in, const OpArgs& args) {
  auto need = [&](std::size_t n) {
    if (in.size() != n)
      throw std::invalid_argument(std::string(op_kind_name(kind)) + ": expected " +
                                  std::to_string(n) + " inputs, got " + std::to_string(in.size()));
  };
  switch (kind) {
    case OpKind::matmul: need(2); return matmul(in[0], in[1]);
    case OpKind::add: need(2); return add(in[0], in[1]);
    case OpKind::multiply_scalar: need(1); return multiply_scalar(in[0], args.scalar);
    case OpKind::concat_last_axis: return concat_last_axis(in);
    case OpKind::relu: need(1); return relu(in[0]);
    case OpKind::tanh: need(1); return tanh(in[0]);
    case OpKind::exp: need(1); return exp(in[0]);
    case OpKind::log: need(1); return log(in[0]);
    case OpKind::softmax_last_axis: need(1); return softmax_last_axis(in[0]);
    case OpKind::mean: need(1); return mean(in[0]);
    case OpKind::sum: need(1); return sum(in[0]);
    case OpKind::elementwise_min_with_scalar: need(1); return minimum(in[0], args.scalar);
    case OpKind::gaussian_reparameterize:
      need(2);
      if (args.rng == nullptr)
        throw std::invalid_argument("gaussian_reparameterize: no rng supplied");
      return gaussian_reparameterize(in[0], in[1], *args.rng);
  }
  throw std::invalid_argument("forward_op: unknown op kind");
}

}  // namespace nmt::ad
