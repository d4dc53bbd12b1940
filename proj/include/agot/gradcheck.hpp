#pragma once

#include <functional>
#include <string>
#include <vector>

#include "agot/tape.hpp"
#include "agot/tensor.hpp"

namespace agot {

// `f` must build a scalar tensor on the given tape from the given input;
// it is evaluated repeatedly with perturbed copies of `x`.
using TensorFunction = std::function<Tensor(Tape&, const Tensor&)>;

struct FiniteDifferenceReport {
    std::vector<double> numeric;   // central-difference estimate per coordinate
    std::vector<double> analytic;  // gradient from backward per coordinate
    double max_rel_err = 0.0;
    std::size_t worst_coord = 0;
    bool pass = false;
};

// Central-difference gradient verification:
//   numeric_i = (f(x + h e_i) - f(x - h e_i)) / (2h)
// compared against the tape gradient with relative error
//   |a - n| / max(|a|, |n|, 1e-8).
FiniteDifferenceReport finite_difference_check(const TensorFunction& f, const Tensor& x,
                                               double h = 1e-5, double tol = 1e-6);

}  // namespace agot
