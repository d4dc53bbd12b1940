#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "agot/errors.hpp"
#include "agot/rng.hpp"

namespace agot {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// Shared storage behind a Tensor handle. `grad` is the persistent gradient
// accumulator; `adjoint` is scratch owned by Tape::backward for one traversal.
struct TensorNode {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;
    std::vector<double> adjoint;
};

}  // namespace detail

// Dense row-major tensor of 64-bit floats with handle (shared) semantics:
// copying a Tensor copies the handle, not the storage. All learned and
// computed quantities in the library are carried by this type.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    // Entries drawn i.i.d. from N(0, sigma^2) using the given stream.
    static Tensor randn(Shape shape, Rng& rng, double sigma, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t numel() const;
    // One element, any rank. Reductions in this library produce rank 0.
    bool is_scalar() const { return defined() && numel() == 1; }

    const std::vector<double>& data() const;
    std::vector<double>& data();
    double value() const;  // scalar read; ContractError otherwise
    double at(std::size_t i) const;
    double at(std::size_t i, std::size_t j) const;
    double& at_mut(std::size_t i, std::size_t j);

    bool requires_grad() const;
    void set_requires_grad(bool flag);
    bool has_grad() const;
    const std::vector<double>& grad() const;  // ContractError when absent
    void zero_grad();                         // zero in place when present
    void drop_grad();                         // release the accumulator

    // Deep copy of values (grad not copied); preserves requires_grad.
    Tensor clone() const;
    bool same_storage(const Tensor& other) const { return node_ == other.node_; }
    bool all_finite() const;

    detail::TensorNode* node() const { return node_.get(); }
    std::shared_ptr<detail::TensorNode> handle() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
    void require_defined() const;

    std::shared_ptr<detail::TensorNode> node_;
};

}  // namespace agot
