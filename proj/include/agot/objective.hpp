#pragma once

#include <string>
#include <vector>

#include "agot/ops.hpp"

namespace agot {

// Temperature-scaled similarity scores between a batch of images (rows) and
// a set of candidate texts (columns). Scores are cosines, so entries lie in
// [-1, 1] whenever both sides are unit-norm.
struct SimilarityMatrix {
    Tensor scores;  // B x K
    double temperature = 0.07;

    std::size_t rows() const { return scores.shape()[0]; }
    std::size_t cols() const { return scores.shape()[1]; }
    void validate() const;  // ConfigError on tau <= 0, DimensionError on rank
};

// softmax(scores[row] / tau); detached (inspection only, the training path
// uses contrastive_loss).
Tensor class_probabilities(const SimilarityMatrix& sim, std::size_t row);

// Mean over rows of -log p(target | row); differentiable through scores.
Tensor contrastive_loss(Tape& tape, const SimilarityMatrix& sim,
                        const std::vector<std::size_t>& targets);

// Fraction of rows whose argmax column is the target; ties break toward the
// lowest column index.
double recall_at_1(const SimilarityMatrix& sim, const std::vector<std::size_t>& targets);

// 2ab / (a + b); DomainError unless both arguments are positive.
double harmonic_mean(double base, double novel);

struct PerClassStat {
    int class_id = 0;
    std::size_t count = 0;
    std::size_t correct = 0;
    double loss_sum = 0.0;
};

struct MetricReport {
    double recall_at_1 = 0.0;
    double accuracy = 0.0;
    double loss = 0.0;
    std::vector<PerClassStat> per_class;
};

// CSV schema shared by training history and evaluation outputs. Fields that
// do not apply are left empty.
std::string metric_csv_header();
std::string metric_csv_row(const std::string& run_id, const std::string& head, std::size_t steps,
                           std::size_t subnodes, const std::string& alpha_mode, std::size_t epoch,
                           const MetricReport& report, double base_acc = -1.0,
                           double new_acc = -1.0, double harmonic = -1.0);

}  // namespace agot
