#pragma once

#include <string>
#include <utility>
#include <vector>

#include "agot/ops.hpp"

namespace agot {

// Three-layer perceptron with ReLU between layers and a linear output. The
// shared architecture of WeightNet, MetaNet and FlowControl; each caller
// applies its own squashing (softmax, none, sigmoid) on top.
struct Mlp3Params {
    Tensor w1, b1;  // hidden x in, hidden
    Tensor w2, b2;  // hidden x hidden, hidden
    Tensor w3, b3;  // out x hidden, out

    std::size_t in_dim() const { return w1.shape()[1]; }
    std::size_t hidden_dim() const { return w1.shape()[0]; }
    std::size_t out_dim() const { return w3.shape()[0]; }

    // Weights ~ N(0, 1/fan_in), zero biases.
    static Mlp3Params init(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng,
                           bool requires_grad = true);
    static Mlp3Params zeros(std::size_t in, std::size_t hidden, std::size_t out,
                            bool requires_grad = true);

    void validate() const;  // DimensionError when the shape chain is broken
    std::vector<std::pair<std::string, Tensor>> named_tensors(const std::string& prefix) const;
};

// w3 * relu(w2 * relu(w1 * x + b1) + b2) + b3 for a rank-1 input.
Tensor mlp3_forward(Tape& tape, const Mlp3Params& params, const Tensor& x);

}  // namespace agot
