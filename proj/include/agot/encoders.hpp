#pragma once

#include <utility>
#include <vector>

#include "agot/ops.hpp"
#include "agot/vocab.hpp"

namespace agot {

// Frozen toy stand-ins for the CLIP dual encoders. Parameters never receive
// gradients; the text side stays differentiable with respect to its input
// embedding sequence so gradients reach the soft prompts.

struct TextEncoderParams {
    Tensor token_embedding;  // |V| x d_e
    Tensor query_map, key_map, value_map;  // d_e x d_e, applied on the right
    Tensor output_map;                     // d_e x d, applied on the right

    std::size_t embed_dim() const { return query_map.shape()[0]; }
    std::size_t feature_dim() const { return output_map.shape()[1]; }

    static TextEncoderParams init(std::size_t vocab_size, std::size_t embed_dim,
                                  std::size_t feature_dim, std::uint64_t seed);
    std::vector<std::pair<std::string, Tensor>> named_tensors() const;
};

struct ImageEncoderParams {
    Tensor w1, b1;  // hidden x raw, hidden
    Tensor w2, b2;  // d x hidden, d

    std::size_t raw_dim() const { return w1.shape()[1]; }
    std::size_t feature_dim() const { return w2.shape()[0]; }

    static ImageEncoderParams init(std::size_t raw_dim, std::size_t hidden,
                                   std::size_t feature_dim, std::uint64_t seed);
    std::vector<std::pair<std::string, Tensor>> named_tensors() const;
};

// Frozen table lookup; rows are detached constants.
Tensor embed_tokens(const std::vector<int>& ids, const TextEncoderParams& params);

// Single-head self-attention, mean pool, projection, L2 normalization.
// Gradients flow to `embeddings` only.
Tensor encode_text_from_embeddings(Tape& tape, const Tensor& embeddings,
                                   const TextEncoderParams& params);

// linear -> relu -> linear -> L2 normalization; fully detached.
Tensor encode_image(Tape& tape, const Tensor& raw_feature, const ImageEncoderParams& params);

}  // namespace agot
