#include "agot/mlp.hpp"

#include <cmath>

namespace agot {

Mlp3Params Mlp3Params::init(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng,
                            bool requires_grad) {
    Mlp3Params p;
    p.w1 = Tensor::randn({hidden, in}, rng, 1.0 / std::sqrt(static_cast<double>(in)), requires_grad);
    p.b1 = Tensor::zeros({hidden}, requires_grad);
    p.w2 = Tensor::randn({hidden, hidden}, rng, 1.0 / std::sqrt(static_cast<double>(hidden)),
                         requires_grad);
    p.b2 = Tensor::zeros({hidden}, requires_grad);
    p.w3 = Tensor::randn({out, hidden}, rng, 1.0 / std::sqrt(static_cast<double>(hidden)),
                         requires_grad);
    p.b3 = Tensor::zeros({out}, requires_grad);
    return p;
}

Mlp3Params Mlp3Params::zeros(std::size_t in, std::size_t hidden, std::size_t out,
                             bool requires_grad) {
    Mlp3Params p;
    p.w1 = Tensor::zeros({hidden, in}, requires_grad);
    p.b1 = Tensor::zeros({hidden}, requires_grad);
    p.w2 = Tensor::zeros({hidden, hidden}, requires_grad);
    p.b2 = Tensor::zeros({hidden}, requires_grad);
    p.w3 = Tensor::zeros({out, hidden}, requires_grad);
    p.b3 = Tensor::zeros({out}, requires_grad);
    return p;
}

void Mlp3Params::validate() const {
    if (w1.rank() != 2 || w2.rank() != 2 || w3.rank() != 2 || b1.rank() != 1 || b2.rank() != 1 ||
        b3.rank() != 1) {
        throw DimensionError("mlp3: weight matrices must be rank-2 and biases rank-1");
    }
    const std::size_t hidden = w1.shape()[0];
    if (w2.shape()[0] != hidden || w2.shape()[1] != hidden || w3.shape()[1] != hidden ||
        b1.shape()[0] != hidden || b2.shape()[0] != hidden || b3.shape()[0] != w3.shape()[0]) {
        throw DimensionError("mlp3: layer widths do not chain");
    }
}

std::vector<std::pair<std::string, Tensor>> Mlp3Params::named_tensors(
    const std::string& prefix) const {
    return {{prefix + "/w1", w1}, {prefix + "/b1", b1}, {prefix + "/w2", w2},
            {prefix + "/b2", b2}, {prefix + "/w3", w3}, {prefix + "/b3", b3}};
}

namespace {

Tensor affine(Tape& tape, const Tensor& w, const Tensor& b, const Tensor& x) {
    Tensor col = ops::reshape(tape, x, {x.numel(), 1});
    Tensor prod = ops::matmul(tape, w, col);
    Tensor flat = ops::reshape(tape, prod, {w.shape()[0]});
    return ops::add(tape, flat, b);
}

}  // namespace

Tensor mlp3_forward(Tape& tape, const Mlp3Params& params, const Tensor& x) {
    params.validate();
    if (x.rank() != 1) {
        throw DimensionError("mlp3_forward expects a rank-1 input, got " + shape_str(x.shape()));
    }
    if (x.shape()[0] != params.in_dim()) {
        throw DimensionError("mlp3_forward: input width " + std::to_string(x.shape()[0]) +
                             " does not match w1 " + shape_str(params.w1.shape()));
    }
    Tensor h1 = ops::relu(tape, affine(tape, params.w1, params.b1, x));
    Tensor h2 = ops::relu(tape, affine(tape, params.w2, params.b2, h1));
    return affine(tape, params.w3, params.b3, h2);
}

}  // namespace agot
