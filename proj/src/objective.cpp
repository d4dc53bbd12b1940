#include "agot/objective.hpp"

#include <cmath>
#include <sstream>

namespace agot {

void SimilarityMatrix::validate() const {
    if (!scores.defined() || scores.rank() != 2) {
        throw DimensionError("similarity scores must be a rank-2 tensor");
    }
    if (!(temperature > 0.0)) {
        throw ConfigError("temperature must be positive, got " + std::to_string(temperature));
    }
}

Tensor class_probabilities(const SimilarityMatrix& sim, std::size_t row) {
    sim.validate();
    if (row >= sim.rows()) {
        throw IndexError("row " + std::to_string(row) + " out of range [0, " +
                         std::to_string(sim.rows()) + ")");
    }
    const std::size_t k = sim.cols();
    std::vector<double> logits(k);
    for (std::size_t j = 0; j < k; ++j) logits[j] = sim.scores.at(row, j) / sim.temperature;
    Tape scratch;
    return ops::softmax_lastdim(scratch, Tensor::from_data({k}, std::move(logits)));
}

Tensor contrastive_loss(Tape& tape, const SimilarityMatrix& sim,
                        const std::vector<std::size_t>& targets) {
    sim.validate();
    if (targets.size() != sim.rows()) {
        throw ContractError("contrastive_loss: one target per row required");
    }
    for (std::size_t t : targets) {
        if (t >= sim.cols()) {
            throw IndexError("target " + std::to_string(t) + " out of range [0, " +
                             std::to_string(sim.cols()) + ")");
        }
    }
    Tensor scaled = ops::scale(tape, sim.scores, 1.0 / sim.temperature);
    return ops::cross_entropy_rows(tape, scaled, targets);
}

double recall_at_1(const SimilarityMatrix& sim, const std::vector<std::size_t>& targets) {
    sim.validate();
    if (targets.size() != sim.rows()) {
        throw ContractError("recall_at_1: one target per row required");
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < sim.rows(); ++r) {
        if (targets[r] >= sim.cols()) {
            throw IndexError("target " + std::to_string(targets[r]) + " out of range");
        }
        std::size_t best = 0;
        double best_score = sim.scores.at(r, 0);
        for (std::size_t c = 1; c < sim.cols(); ++c) {
            const double s = sim.scores.at(r, c);
            if (s > best_score) {  // strict: ties keep the lowest index
                best_score = s;
                best = c;
            }
        }
        if (best == targets[r]) ++hits;
    }
    return sim.rows() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(sim.rows());
}

double harmonic_mean(double base, double novel) {
    if (!(base > 0.0) || !(novel > 0.0)) {
        throw DomainError("harmonic_mean requires positive inputs, got " + std::to_string(base) +
                          " and " + std::to_string(novel));
    }
    return 2.0 * base * novel / (base + novel);
}

std::string metric_csv_header() {
    return "run_id,head,Z,R,alpha_mode,epoch,loss,recall_at_1,accuracy,base_acc,new_acc,H";
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

std::string metric_csv_row(const std::string& run_id, const std::string& head, std::size_t steps,
                           std::size_t subnodes, const std::string& alpha_mode, std::size_t epoch,
                           const MetricReport& report, double base_acc, double new_acc,
                           double harmonic) {
    std::ostringstream os;
    os << run_id << ',' << head << ',' << steps << ',' << subnodes << ',' << alpha_mode << ','
       << epoch << ',' << fmt(report.loss) << ',' << fmt(report.recall_at_1) << ','
       << fmt(report.accuracy) << ',';
    if (base_acc >= 0.0) os << fmt(base_acc);
    os << ',';
    if (new_acc >= 0.0) os << fmt(new_acc);
    os << ',';
    if (harmonic >= 0.0) os << fmt(harmonic);
    return os.str();
}

}  // namespace agot
