#pragma once

#include <functional>
#include <unordered_set>
#include <vector>

#include "agot/tensor.hpp"

namespace agot {

// Reverse-mode tape. Primitives record one pull step each, in application
// order; record order is therefore a topological order of the graph.
//
// backward(loss) propagates adjoints through the pull steps in reverse
// recording order (each step runs exactly once) and then adds the adjoint of
// every requires_grad tensor into its persistent grad buffer. Because every
// traversal starts from fresh adjoints, running backward twice without
// zeroing grads doubles each gradient exactly.
//
// Tapes are single-writer: build and differentiate on one thread.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // `touched` lists every tensor whose adjoint the pull reads or writes.
    void record(std::vector<Tensor> touched, std::function<void()> pull);

    void backward(const Tensor& loss);

    std::size_t size() const { return steps_.size(); }

private:
    struct Step {
        std::function<void()> pull;
    };

    std::vector<Step> steps_;
    std::vector<Tensor> touched_;
    std::unordered_set<detail::TensorNode*> seen_;
};

}  // namespace agot
