#pragma once

#include <vector>

#include "agot/tape.hpp"
#include "agot/tensor.hpp"

namespace agot {
namespace ops {

// Differentiable primitives. Each computes its forward value eagerly and,
// when some input requires grad, records one pull step on the tape. Inputs
// that do not require grad receive no gradient and cost no tape work.

// -------- linear algebra --------

// [m x k] * [k x n] -> [m x n]
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor transpose(Tape& tape, const Tensor& a);
Tensor reshape(Tape& tape, const Tensor& a, Shape shape);

// -------- elementwise --------

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
// Broadcast multiply by a scalar tensor; gradient reaches both arguments.
Tensor mul_scalar(Tape& tape, const Tensor& s, const Tensor& a);
Tensor relu(Tape& tape, const Tensor& a);
Tensor sigmoid(Tape& tape, const Tensor& a);

// -------- reductions and structure --------

Tensor sum(Tape& tape, const Tensor& a);     // rank-0
Tensor mean(Tape& tape, const Tensor& a);    // rank-0
Tensor mean_rows(Tape& tape, const Tensor& a);  // [m x n] -> [n]
// Concatenate along the token (row) axis; a 1-d input counts as one row.
Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts);

// -------- normalization and similarity --------

// Max-subtracted softmax over the trailing axis; slices sum to 1.
Tensor softmax_lastdim(Tape& tape, const Tensor& a);
Tensor l2_norm(Tape& tape, const Tensor& v);        // rank-0
Tensor l2_normalize(Tape& tape, const Tensor& v);   // DegenerateInputError near zero
Tensor cosine_similarity(Tape& tape, const Tensor& u, const Tensor& v);

// Fused log-softmax + negative log likelihood, averaged over rows.
// logits: [B x K] (or [K] for a single row); one target column per row.
Tensor cross_entropy_rows(Tape& tape, const Tensor& logits,
                          const std::vector<std::size_t>& targets);

}  // namespace ops
}  // namespace agot
