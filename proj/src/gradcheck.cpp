#include "agot/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace agot {

namespace {

double scalar_output(const TensorFunction& f, Tape& tape, const Tensor& x) {
    Tensor y = f(tape, x);
    if (!y.defined() || !y.is_scalar()) {
        throw ContractError("finite_difference_check: function output must be scalar");
    }
    return y.value();
}

}  // namespace

FiniteDifferenceReport finite_difference_check(const TensorFunction& f, const Tensor& x,
                                               double h, double tol) {
    if (!(h > 0.0)) throw ContractError("finite_difference_check: step must be positive");

    // Analytic pass on a fresh differentiable copy of x.
    Tensor probe = x.clone();
    probe.set_requires_grad(true);
    {
        Tape tape;
        Tensor y = f(tape, probe);
        if (!y.defined() || !y.is_scalar()) {
            throw ContractError("finite_difference_check: function output must be scalar");
        }
        tape.backward(y);
    }

    FiniteDifferenceReport report;
    report.analytic = probe.has_grad() ? probe.grad() : std::vector<double>(x.numel(), 0.0);
    report.numeric.resize(x.numel());

    Tensor shifted = x.clone();
    shifted.set_requires_grad(false);
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const double original = shifted.data()[i];
        shifted.data()[i] = original + h;
        double plus;
        {
            Tape tape;
            plus = scalar_output(f, tape, shifted);
        }
        shifted.data()[i] = original - h;
        double minus;
        {
            Tape tape;
            minus = scalar_output(f, tape, shifted);
        }
        shifted.data()[i] = original;
        report.numeric[i] = (plus - minus) / (2.0 * h);
    }

    for (std::size_t i = 0; i < x.numel(); ++i) {
        const double a = report.analytic[i];
        const double n = report.numeric[i];
        const double denom = std::max({std::fabs(a), std::fabs(n), 1e-8});
        const double rel = std::fabs(a - n) / denom;
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_coord = i;
        }
    }
    report.pass = report.max_rel_err < tol;
    return report;
}

}  // namespace agot
