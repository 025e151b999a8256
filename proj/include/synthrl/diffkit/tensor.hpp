#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <vector>

namespace synthrl::diffkit {

using Array = Eigen::ArrayXd;
using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense 64-bit tensor with shared ownership. Values are a flat row-major
// buffer; the gradient buffer is allocated on first accumulation. Copying a
// Tensor copies the handle, not the storage.
class Tensor {
  struct Impl {
    std::vector<int> shape;
    Array values;
    Array grad;  // size 0 until first accumulation
    bool requires_grad = false;
    bool tracked = false;
  };

 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
    Tensor t;
    t.impl_ = std::make_shared<Impl>();
    t.impl_->shape = std::move(shape);
    t.impl_->values = Array::Zero(numel(t.impl_->shape));
    t.impl_->requires_grad = requires_grad;
    return t;
  }

  static Tensor from_values(std::vector<int> shape, const std::vector<double>& values,
                            bool requires_grad = false) {
    Tensor t = zeros(std::move(shape), requires_grad);
    if (static_cast<Eigen::Index>(values.size()) != t.size()) {
      throw std::invalid_argument("value count does not match shape");
    }
    for (Eigen::Index i = 0; i < t.size(); ++i) t.values()[i] = values[i];
    return t;
  }

  static Tensor scalar(double value) {
    Tensor t = zeros({1});
    t.values()[0] = value;
    return t;
  }

  bool defined() const { return impl_ != nullptr; }

  const std::vector<int>& shape() const { return impl_->shape; }
  int ndim() const { return static_cast<int>(impl_->shape.size()); }
  int dim(int i) const { return impl_->shape[i]; }
  Eigen::Index size() const { return impl_->values.size(); }

  // 2-D views; 1-D tensors count as a single row.
  int rows() const { return ndim() == 1 ? 1 : dim(0); }
  int cols() const { return ndim() == 1 ? dim(0) : dim(1); }

  Array& values() { return impl_->values; }
  const Array& values() const { return impl_->values; }

  double value() const {
    if (size() != 1) throw std::logic_error("value() on a non-scalar tensor");
    return impl_->values[0];
  }

  bool requires_grad() const { return impl_->requires_grad; }
  bool tracked() const { return impl_->tracked || impl_->requires_grad; }
  void mark_tracked() { impl_->tracked = true; }

  bool has_grad() const { return impl_->grad.size() > 0; }

  // Allocates a zero gradient buffer on first use.
  Array& grad() {
    if (!has_grad()) impl_->grad = Array::Zero(size());
    return impl_->grad;
  }
  const Array& grad() const {
    if (!has_grad()) throw std::logic_error("gradient not populated");
    return impl_->grad;
  }

  void drop_grad() { impl_->grad.resize(0); }

  Eigen::Map<const MatrixRM> matrix() const {
    return {impl_->values.data(), rows(), cols()};
  }
  Eigen::Map<MatrixRM> matrix() {
    return {impl_->values.data(), rows(), cols()};
  }
  Eigen::Map<MatrixRM> grad_matrix() {
    return {grad().data(), rows(), cols()};
  }

  bool same_impl(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  static Eigen::Index numel(const std::vector<int>& shape) {
    Eigen::Index n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
      n *= d;
    }
    return n;
  }

  std::shared_ptr<Impl> impl_;
};

}  // namespace synthrl::diffkit
