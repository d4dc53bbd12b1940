#include "agot/ops.hpp"

#include <algorithm>
#include <cmath>

namespace agot {
namespace ops {

namespace {

constexpr double kNormEpsilon = 1e-12;

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                             " vs " + shape_str(b.shape()));
    }
}

std::vector<double>& adj(const Tensor& t) { return t.node()->adjoint; }

bool tracked(const Tensor& t) { return t.requires_grad(); }

// Stable logistic function.
double sigmoid_value(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw DimensionError("matmul expects rank-2 tensors, got " + shape_str(a.shape()) +
                             " and " + shape_str(b.shape()));
    }
    const std::size_t m = a.shape()[0], k = a.shape()[1];
    const std::size_t k2 = b.shape()[0], n = b.shape()[1];
    if (k != k2) {
        throw DimensionError("matmul: inner extents differ, " + shape_str(a.shape()) + " x " +
                             shape_str(b.shape()));
    }
    Tensor out = Tensor::zeros({m, n});
    {
        const auto& av = a.data();
        const auto& bv = b.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
                const double aip = av[i * k + p];
                if (aip == 0.0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    ov[i * n + j] += aip * bv[p * n + j];
                }
            }
        }
    }
    if (tracked(a) || tracked(b)) {
        out.set_requires_grad(true);
        tape.record({a, b, out}, [a, b, out, m, k, n]() {
            const auto& go = adj(out);
            if (a.requires_grad()) {
                auto& ga = adj(a);
                const auto& bv = b.data();
                // dA += dC * B^T
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        const double g = go[i * n + j];
                        if (g == 0.0) continue;
                        for (std::size_t p = 0; p < k; ++p) {
                            ga[i * k + p] += g * bv[p * n + j];
                        }
                    }
                }
            }
            if (b.requires_grad()) {
                auto& gb = adj(b);
                const auto& av = a.data();
                // dB += A^T * dC
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t p = 0; p < k; ++p) {
                        const double aip = av[i * k + p];
                        if (aip == 0.0) continue;
                        for (std::size_t j = 0; j < n; ++j) {
                            gb[p * n + j] += aip * go[i * n + j];
                        }
                    }
                }
            }
        });
    }
    return out;
}

Tensor transpose(Tape& tape, const Tensor& a) {
    if (a.rank() != 2) {
        throw DimensionError("transpose expects a rank-2 tensor, got " + shape_str(a.shape()));
    }
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    Tensor out = Tensor::zeros({n, m});
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) ov[j * m + i] = av[i * n + j];
        }
    }
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out, m, n]() {
            const auto& go = adj(out);
            auto& ga = adj(a);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += go[j * m + i];
            }
        });
    }
    return out;
}

Tensor reshape(Tape& tape, const Tensor& a, Shape shape) {
    if (shape_numel(shape) != a.numel()) {
        throw DimensionError("reshape: " + shape_str(a.shape()) + " has " +
                             std::to_string(a.numel()) + " elements, target " + shape_str(shape));
    }
    Tensor out = Tensor::from_data(std::move(shape), a.data());
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out]() {
            const auto& go = adj(out);
            auto& ga = adj(a);
            for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
        });
    }
    return out;
}

namespace {

template <typename Fwd, typename Pull>
Tensor binary_elementwise(Tape& tape, const Tensor& a, const Tensor& b, const char* name,
                          Fwd fwd, Pull pull) {
    check_same_shape(a, b, name);
    Tensor out = Tensor::zeros(a.shape());
    {
        const auto& av = a.data();
        const auto& bv = b.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = fwd(av[i], bv[i]);
    }
    if (tracked(a) || tracked(b)) {
        out.set_requires_grad(true);
        tape.record({a, b, out}, [a, b, out, pull]() { pull(a, b, out); });
    }
    return out;
}

}  // namespace

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    return binary_elementwise(
        tape, a, b, "add", [](double x, double y) { return x + y; },
        [](const Tensor& a, const Tensor& b, const Tensor& out) {
            const auto& go = adj(out);
            if (a.requires_grad()) {
                auto& ga = adj(a);
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
            }
            if (b.requires_grad()) {
                auto& gb = adj(b);
                for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i];
            }
        });
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
    return binary_elementwise(
        tape, a, b, "sub", [](double x, double y) { return x - y; },
        [](const Tensor& a, const Tensor& b, const Tensor& out) {
            const auto& go = adj(out);
            if (a.requires_grad()) {
                auto& ga = adj(a);
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
            }
            if (b.requires_grad()) {
                auto& gb = adj(b);
                for (std::size_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
            }
        });
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
    return binary_elementwise(
        tape, a, b, "mul", [](double x, double y) { return x * y; },
        [](const Tensor& a, const Tensor& b, const Tensor& out) {
            const auto& go = adj(out);
            if (a.requires_grad()) {
                auto& ga = adj(a);
                const auto& bv = b.data();
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * bv[i];
            }
            if (b.requires_grad()) {
                auto& gb = adj(b);
                const auto& av = a.data();
                for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * av[i];
            }
        });
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
    Tensor out = Tensor::zeros(a.shape());
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = factor * av[i];
    }
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out, factor]() {
            const auto& go = adj(out);
            auto& ga = adj(a);
            for (std::size_t i = 0; i < go.size(); ++i) ga[i] += factor * go[i];
        });
    }
    return out;
}

Tensor mul_scalar(Tape& tape, const Tensor& s, const Tensor& a) {
    if (!s.is_scalar()) {
        throw DimensionError("mul_scalar: multiplier must be scalar, got " + shape_str(s.shape()));
    }
    const double sv = s.value();
    Tensor out = Tensor::zeros(a.shape());
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = sv * av[i];
    }
    if (tracked(s) || tracked(a)) {
        out.set_requires_grad(true);
        tape.record({s, a, out}, [s, a, out]() {
            const auto& go = adj(out);
            if (a.requires_grad()) {
                auto& ga = adj(a);
                const double sv = s.value();
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += sv * go[i];
            }
            if (s.requires_grad()) {
                const auto& av = a.data();
                double acc = 0.0;
                for (std::size_t i = 0; i < go.size(); ++i) acc += go[i] * av[i];
                adj(s)[0] += acc;
            }
        });
    }
    return out;
}

Tensor relu(Tape& tape, const Tensor& a) {
    Tensor out = Tensor::zeros(a.shape());
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] > 0.0 ? av[i] : 0.0;
    }
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out]() {
            const auto& go = adj(out);
            const auto& av = a.data();
            auto& ga = adj(a);
            for (std::size_t i = 0; i < go.size(); ++i) {
                if (av[i] > 0.0) ga[i] += go[i];
            }
        });
    }
    return out;
}

Tensor sigmoid(Tape& tape, const Tensor& a) {
    Tensor out = Tensor::zeros(a.shape());
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = sigmoid_value(av[i]);
    }
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out]() {
            const auto& go = adj(out);
            const auto& ov = out.data();
            auto& ga = adj(a);
            for (std::size_t i = 0; i < go.size(); ++i) {
                ga[i] += go[i] * ov[i] * (1.0 - ov[i]);
            }
        });
    }
    return out;
}

Tensor sum(Tape& tape, const Tensor& a) {
    double acc = 0.0;
    for (double v : a.data()) acc += v;
    Tensor out = Tensor::scalar(acc);
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out]() {
            const double g = adj(out)[0];
            auto& ga = adj(a);
            for (double& v : ga) v += g;
        });
    }
    return out;
}

Tensor mean(Tape& tape, const Tensor& a) {
    double acc = 0.0;
    for (double v : a.data()) acc += v;
    const double inv = 1.0 / static_cast<double>(a.numel());
    Tensor out = Tensor::scalar(acc * inv);
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out, inv]() {
            const double g = adj(out)[0] * inv;
            auto& ga = adj(a);
            for (double& v : ga) v += g;
        });
    }
    return out;
}

Tensor mean_rows(Tape& tape, const Tensor& a) {
    if (a.rank() != 2) {
        throw DimensionError("mean_rows expects a rank-2 tensor, got " + shape_str(a.shape()));
    }
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    const double inv = 1.0 / static_cast<double>(m);
    Tensor out = Tensor::zeros({n});
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) ov[j] += av[i * n + j];
        }
        for (double& v : ov) v *= inv;
    }
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out, m, n, inv]() {
            const auto& go = adj(out);
            auto& ga = adj(a);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += go[j] * inv;
            }
        });
    }
    return out;
}

Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts) {
    if (parts.empty()) throw EmptyInputError("concat_rows: no parts");
    std::size_t cols = 0, rows = 0;
    bool any_grad = false;
    for (const Tensor& p : parts) {
        if (p.rank() != 1 && p.rank() != 2) {
            throw DimensionError("concat_rows expects rank-1 or rank-2 parts, got " +
                                 shape_str(p.shape()));
        }
        const std::size_t pc = p.rank() == 1 ? p.shape()[0] : p.shape()[1];
        const std::size_t pr = p.rank() == 1 ? 1 : p.shape()[0];
        if (cols == 0) {
            cols = pc;
        } else if (pc != cols) {
            throw DimensionError("concat_rows: column count mismatch, " + std::to_string(pc) +
                                 " vs " + std::to_string(cols));
        }
        rows += pr;
        any_grad = any_grad || p.requires_grad();
    }
    Tensor out = Tensor::zeros({rows, cols});
    {
        auto& ov = out.data();
        std::size_t offset = 0;
        for (const Tensor& p : parts) {
            const auto& pv = p.data();
            std::copy(pv.begin(), pv.end(), ov.begin() + static_cast<std::ptrdiff_t>(offset));
            offset += pv.size();
        }
    }
    if (any_grad) {
        out.set_requires_grad(true);
        std::vector<Tensor> touched = parts;
        touched.push_back(out);
        tape.record(std::move(touched), [parts, out]() {
            const auto& go = adj(out);
            std::size_t offset = 0;
            for (const Tensor& p : parts) {
                const std::size_t len = p.numel();
                if (p.requires_grad()) {
                    auto& gp = adj(p);
                    for (std::size_t i = 0; i < len; ++i) gp[i] += go[offset + i];
                }
                offset += len;
            }
        });
    }
    return out;
}

Tensor softmax_lastdim(Tape& tape, const Tensor& a) {
    if (a.rank() == 0) throw DimensionError("softmax_lastdim needs at least one axis");
    const std::size_t width = a.shape().back();
    const std::size_t slices = a.numel() / width;
    Tensor out = Tensor::zeros(a.shape());
    {
        const auto& av = a.data();
        auto& ov = out.data();
        for (std::size_t s = 0; s < slices; ++s) {
            const std::size_t base = s * width;
            double mx = av[base];
            for (std::size_t i = 1; i < width; ++i) mx = std::max(mx, av[base + i]);
            double denom = 0.0;
            for (std::size_t i = 0; i < width; ++i) {
                const double e = std::exp(av[base + i] - mx);
                ov[base + i] = e;
                denom += e;
            }
            const double inv = 1.0 / denom;
            for (std::size_t i = 0; i < width; ++i) ov[base + i] *= inv;
        }
    }
    if (tracked(a)) {
        out.set_requires_grad(true);
        tape.record({a, out}, [a, out, slices, width]() {
            const auto& go = adj(out);
            const auto& ov = out.data();
            auto& ga = adj(a);
            for (std::size_t s = 0; s < slices; ++s) {
                const std::size_t base = s * width;
                double dot = 0.0;
                for (std::size_t i = 0; i < width; ++i) dot += go[base + i] * ov[base + i];
                for (std::size_t i = 0; i < width; ++i) {
                    ga[base + i] += ov[base + i] * (go[base + i] - dot);
                }
            }
        });
    }
    return out;
}

Tensor l2_norm(Tape& tape, const Tensor& v) {
    double sq = 0.0;
    for (double x : v.data()) sq += x * x;
    const double norm = std::sqrt(sq);
    Tensor out = Tensor::scalar(norm);
    if (tracked(v)) {
        out.set_requires_grad(true);
        tape.record({v, out}, [v, out, norm]() {
            if (norm <= kNormEpsilon) return;  // gradient undefined at the origin
            const double g = adj(out)[0] / norm;
            const auto& vv = v.data();
            auto& gv = adj(v);
            for (std::size_t i = 0; i < vv.size(); ++i) gv[i] += g * vv[i];
        });
    }
    return out;
}

Tensor l2_normalize(Tape& tape, const Tensor& v) {
    double sq = 0.0;
    for (double x : v.data()) sq += x * x;
    const double norm = std::sqrt(sq);
    if (!(norm > kNormEpsilon)) {
        throw DegenerateInputError("l2_normalize: input norm " + std::to_string(norm) +
                                   " is below " + std::to_string(kNormEpsilon));
    }
    Tensor out = Tensor::zeros(v.shape());
    {
        const auto& vv = v.data();
        auto& ov = out.data();
        const double inv = 1.0 / norm;
        for (std::size_t i = 0; i < vv.size(); ++i) ov[i] = vv[i] * inv;
    }
    if (tracked(v)) {
        out.set_requires_grad(true);
        tape.record({v, out}, [v, out, norm]() {
            // d(v/|v|) = (I - u u^T) / |v|, with u = v/|v|
            const auto& go = adj(out);
            const auto& ov = out.data();
            auto& gv = adj(v);
            double dot = 0.0;
            for (std::size_t i = 0; i < go.size(); ++i) dot += go[i] * ov[i];
            const double inv = 1.0 / norm;
            for (std::size_t i = 0; i < go.size(); ++i) {
                gv[i] += (go[i] - dot * ov[i]) * inv;
            }
        });
    }
    return out;
}

Tensor cosine_similarity(Tape& tape, const Tensor& u, const Tensor& v) {
    check_same_shape(u, v, "cosine_similarity");
    double uu = 0.0, vv = 0.0, uv = 0.0;
    const auto& ud = u.data();
    const auto& vd = v.data();
    for (std::size_t i = 0; i < ud.size(); ++i) {
        uu += ud[i] * ud[i];
        vv += vd[i] * vd[i];
        uv += ud[i] * vd[i];
    }
    const double nu = std::sqrt(uu), nv = std::sqrt(vv);
    if (!(nu > kNormEpsilon) || !(nv > kNormEpsilon)) {
        throw DegenerateInputError("cosine_similarity: input norm below 1e-12");
    }
    const double cos_val = uv / (nu * nv);
    Tensor out = Tensor::scalar(cos_val);
    if (tracked(u) || tracked(v)) {
        out.set_requires_grad(true);
        tape.record({u, v, out}, [u, v, out, nu, nv, cos_val]() {
            const double g = adj(out)[0];
            const auto& ud = u.data();
            const auto& vd = v.data();
            const double inv_unv = 1.0 / (nu * nv);
            if (u.requires_grad()) {
                auto& gu = adj(u);
                const double inv_uu = cos_val / (nu * nu);
                for (std::size_t i = 0; i < ud.size(); ++i) {
                    gu[i] += g * (vd[i] * inv_unv - ud[i] * inv_uu);
                }
            }
            if (v.requires_grad()) {
                auto& gv = adj(v);
                const double inv_vv = cos_val / (nv * nv);
                for (std::size_t i = 0; i < vd.size(); ++i) {
                    gv[i] += g * (ud[i] * inv_unv - vd[i] * inv_vv);
                }
            }
        });
    }
    return out;
}

Tensor cross_entropy_rows(Tape& tape, const Tensor& logits,
                          const std::vector<std::size_t>& targets) {
    if (logits.rank() != 1 && logits.rank() != 2) {
        throw DimensionError("cross_entropy_rows expects rank-1 or rank-2 logits, got " +
                             shape_str(logits.shape()));
    }
    const std::size_t rows = logits.rank() == 2 ? logits.shape()[0] : 1;
    const std::size_t width = logits.rank() == 2 ? logits.shape()[1] : logits.shape()[0];
    if (targets.size() != rows) {
        throw ContractError("cross_entropy_rows: " + std::to_string(rows) + " rows but " +
                            std::to_string(targets.size()) + " targets");
    }
    for (std::size_t t : targets) {
        if (t >= width) {
            throw IndexError("cross_entropy_rows: target " + std::to_string(t) +
                             " out of range [0, " + std::to_string(width) + ")");
        }
    }
    // Forward saves the row softmax for the pull step.
    std::vector<double> probs(logits.numel());
    double total = 0.0;
    {
        const auto& zv = logits.data();
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t base = r * width;
            double mx = zv[base];
            for (std::size_t i = 1; i < width; ++i) mx = std::max(mx, zv[base + i]);
            double denom = 0.0;
            for (std::size_t i = 0; i < width; ++i) {
                const double e = std::exp(zv[base + i] - mx);
                probs[base + i] = e;
                denom += e;
            }
            const double inv = 1.0 / denom;
            for (std::size_t i = 0; i < width; ++i) probs[base + i] *= inv;
            total += std::log(denom) + mx - zv[base + targets[r]];
        }
    }
    Tensor out = Tensor::scalar(total / static_cast<double>(rows));
    if (tracked(logits)) {
        out.set_requires_grad(true);
        const double inv_rows = 1.0 / static_cast<double>(rows);
        tape.record({logits, out},
                    [logits, out, probs = std::move(probs), targets, rows, width, inv_rows]() {
                        const double g = adj(out)[0] * inv_rows;
                        auto& gz = adj(logits);
                        for (std::size_t r = 0; r < rows; ++r) {
                            const std::size_t base = r * width;
                            for (std::size_t i = 0; i < width; ++i) {
                                double delta = probs[base + i];
                                if (i == targets[r]) delta -= 1.0;
                                gz[base + i] += g * delta;
                            }
                        }
                    });
    }
    return out;
}

}  // namespace ops
}  // namespace agot
