#include "agot/tensor.hpp"

#include <cmath>
#include <sstream>

namespace agot {

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    for (std::size_t d : shape) {
        if (d == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
    }
    auto node = std::make_shared<detail::TensorNode>();
    node->data.assign(shape_numel(shape), value);
    node->shape = std::move(shape);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data, bool requires_grad) {
    if (shape_numel(shape) != data.size()) {
        throw DimensionError("data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
    }
    for (std::size_t d : shape) {
        if (d == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
    }
    auto node = std::make_shared<detail::TensorNode>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from_data({}, {value}, requires_grad);
}

Tensor Tensor::randn(Shape shape, Rng& rng, double sigma, bool requires_grad) {
    const std::size_t n = shape_numel(shape);
    return from_data(std::move(shape), rng.normal_vector(n, sigma), requires_grad);
}

void Tensor::require_defined() const {
    if (!node_) throw ContractError("operation on an empty tensor handle");
}

const Shape& Tensor::shape() const {
    require_defined();
    return node_->shape;
}

std::size_t Tensor::numel() const {
    require_defined();
    return node_->data.size();
}

const std::vector<double>& Tensor::data() const {
    require_defined();
    return node_->data;
}

std::vector<double>& Tensor::data() {
    require_defined();
    return node_->data;
}

double Tensor::value() const {
    if (!is_scalar()) {
        throw ContractError("expected a scalar tensor, got shape " + shape_str(shape()));
    }
    return node_->data[0];
}

double Tensor::at(std::size_t i) const {
    require_defined();
    if (i >= node_->data.size()) throw IndexError("flat index out of range");
    return node_->data[i];
}

double Tensor::at(std::size_t i, std::size_t j) const {
    require_defined();
    if (rank() != 2) throw DimensionError("2-d access on tensor of shape " + shape_str(shape()));
    if (i >= node_->shape[0] || j >= node_->shape[1]) throw IndexError("index out of range");
    return node_->data[i * node_->shape[1] + j];
}

double& Tensor::at_mut(std::size_t i, std::size_t j) {
    require_defined();
    if (rank() != 2) throw DimensionError("2-d access on tensor of shape " + shape_str(shape()));
    if (i >= node_->shape[0] || j >= node_->shape[1]) throw IndexError("index out of range");
    return node_->data[i * node_->shape[1] + j];
}

bool Tensor::requires_grad() const {
    require_defined();
    return node_->requires_grad;
}

void Tensor::set_requires_grad(bool flag) {
    require_defined();
    node_->requires_grad = flag;
    if (!flag) node_->grad.clear();
}

bool Tensor::has_grad() const {
    require_defined();
    return !node_->grad.empty();
}

const std::vector<double>& Tensor::grad() const {
    require_defined();
    if (node_->grad.empty()) {
        throw ContractError("tensor holds no gradient (run backward first)");
    }
    return node_->grad;
}

void Tensor::zero_grad() {
    require_defined();
    if (!node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
}

void Tensor::drop_grad() {
    require_defined();
    node_->grad.clear();
}

Tensor Tensor::clone() const {
    require_defined();
    return from_data(node_->shape, node_->data, node_->requires_grad);
}

bool Tensor::all_finite() const {
    require_defined();
    for (double v : node_->data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace agot
