#include "agot/encoders.hpp"

#include <cmath>

namespace agot {

TextEncoderParams TextEncoderParams::init(std::size_t vocab_size, std::size_t embed_dim,
                                          std::size_t feature_dim, std::uint64_t seed) {
    if (vocab_size == 0 || embed_dim == 0 || feature_dim == 0) {
        throw ConfigError("text encoder dimensions must be positive");
    }
    const double sigma = 1.0 / std::sqrt(static_cast<double>(embed_dim));
    Rng rng(mix_seed(seed, 0x7E47));
    TextEncoderParams p;
    p.token_embedding = Tensor::randn({vocab_size, embed_dim}, rng, sigma);
    p.query_map = Tensor::randn({embed_dim, embed_dim}, rng, sigma);
    p.key_map = Tensor::randn({embed_dim, embed_dim}, rng, sigma);
    p.value_map = Tensor::randn({embed_dim, embed_dim}, rng, sigma);
    p.output_map = Tensor::randn({embed_dim, feature_dim}, rng, sigma);
    return p;
}

std::vector<std::pair<std::string, Tensor>> TextEncoderParams::named_tensors() const {
    return {{"text/embedding", token_embedding},
            {"text/query", query_map},
            {"text/key", key_map},
            {"text/value", value_map},
            {"text/output", output_map}};
}

ImageEncoderParams ImageEncoderParams::init(std::size_t raw_dim, std::size_t hidden,
                                            std::size_t feature_dim, std::uint64_t seed) {
    if (raw_dim == 0 || hidden == 0 || feature_dim == 0) {
        throw ConfigError("image encoder dimensions must be positive");
    }
    Rng rng(mix_seed(seed, 0x1317));
    ImageEncoderParams p;
    p.w1 = Tensor::randn({hidden, raw_dim}, rng, 1.0 / std::sqrt(static_cast<double>(raw_dim)));
    p.b1 = Tensor::randn({hidden}, rng, 1.0 / std::sqrt(static_cast<double>(raw_dim)));
    p.w2 = Tensor::randn({feature_dim, hidden}, rng, 1.0 / std::sqrt(static_cast<double>(hidden)));
    p.b2 = Tensor::randn({feature_dim}, rng, 1.0 / std::sqrt(static_cast<double>(hidden)));
    return p;
}

std::vector<std::pair<std::string, Tensor>> ImageEncoderParams::named_tensors() const {
    return {{"image/w1", w1}, {"image/b1", b1}, {"image/w2", w2}, {"image/b2", b2}};
}

Tensor embed_tokens(const std::vector<int>& ids, const TextEncoderParams& params) {
    if (ids.empty()) throw EmptyInputError("embed_tokens: empty id sequence");
    const std::size_t vocab_size = params.token_embedding.shape()[0];
    const std::size_t width = params.token_embedding.shape()[1];
    std::vector<double> rows;
    rows.reserve(ids.size() * width);
    const auto& table = params.token_embedding.data();
    for (int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
            throw VocabError("token id " + std::to_string(id) + " outside table of size " +
                             std::to_string(vocab_size));
        }
        const std::size_t base = static_cast<std::size_t>(id) * width;
        rows.insert(rows.end(), table.begin() + static_cast<std::ptrdiff_t>(base),
                    table.begin() + static_cast<std::ptrdiff_t>(base + width));
    }
    return Tensor::from_data({ids.size(), width}, std::move(rows));
}

Tensor encode_text_from_embeddings(Tape& tape, const Tensor& embeddings,
                                   const TextEncoderParams& params) {
    if (embeddings.rank() != 2) {
        throw DimensionError("encode_text_from_embeddings expects [tokens x embed_dim], got " +
                             shape_str(embeddings.shape()));
    }
    if (embeddings.shape()[0] == 0) throw EmptyInputError("encode_text: zero-length sequence");
    if (embeddings.shape()[1] != params.embed_dim()) {
        throw DimensionError("encode_text: embedding width " +
                             std::to_string(embeddings.shape()[1]) + " does not match encoder " +
                             std::to_string(params.embed_dim()));
    }
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params.embed_dim()));
    Tensor queries = ops::matmul(tape, embeddings, params.query_map);
    Tensor keys = ops::matmul(tape, embeddings, params.key_map);
    Tensor values = ops::matmul(tape, embeddings, params.value_map);
    Tensor logits = ops::scale(tape, ops::matmul(tape, queries, ops::transpose(tape, keys)),
                               inv_sqrt_d);
    Tensor attention = ops::softmax_lastdim(tape, logits);
    Tensor mixed = ops::matmul(tape, attention, values);
    Tensor pooled = ops::mean_rows(tape, mixed);
    Tensor projected = ops::reshape(
        tape,
        ops::matmul(tape, ops::reshape(tape, pooled, {1, params.embed_dim()}), params.output_map),
        {params.feature_dim()});
    return ops::l2_normalize(tape, projected);
}

Tensor encode_image(Tape& tape, const Tensor& raw_feature, const ImageEncoderParams& params) {
    if (raw_feature.rank() != 1 || raw_feature.shape()[0] != params.raw_dim()) {
        throw DimensionError("encode_image: feature shape " + shape_str(raw_feature.shape()) +
                             " does not match raw dim " + std::to_string(params.raw_dim()));
    }
    auto affine = [&](const Tensor& w, const Tensor& b, const Tensor& x) {
        Tensor col = ops::reshape(tape, x, {x.numel(), 1});
        return ops::add(tape, ops::reshape(tape, ops::matmul(tape, w, col), {w.shape()[0]}), b);
    };
    Tensor hidden = ops::relu(tape, affine(params.w1, params.b1, raw_feature));
    Tensor feature = affine(params.w2, params.b2, hidden);
    return ops::l2_normalize(tape, feature);
}

}  // namespace agot
