#include "agot/tape.hpp"

namespace agot {

void Tape::record(std::vector<Tensor> touched, std::function<void()> pull) {
    for (const Tensor& t : touched) {
        if (!t.defined()) throw ContractError("recorded an undefined tensor");
        if (seen_.insert(t.node()).second) touched_.push_back(t);
    }
    steps_.push_back(Step{std::move(pull)});
}

void Tape::backward(const Tensor& loss) {
    if (!loss.defined() || !loss.is_scalar()) {
        throw ContractError("backward requires a scalar loss");
    }
    if (seen_.insert(loss.node()).second) touched_.push_back(loss);
    for (const Tensor& t : touched_) {
        t.node()->adjoint.assign(t.numel(), 0.0);
    }
    loss.node()->adjoint[0] = 1.0;

    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        it->pull();
    }

    for (const Tensor& t : touched_) {
        auto* node = t.node();
        if (!node->requires_grad) {
            node->adjoint.clear();
            continue;
        }
        if (node->grad.empty()) node->grad.assign(node->data.size(), 0.0);
        for (std::size_t i = 0; i < node->data.size(); ++i) {
            node->grad[i] += node->adjoint[i];
        }
        node->adjoint.clear();
    }
}

}  // namespace agot
