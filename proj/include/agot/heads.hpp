#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agot/encoders.hpp"
#include "agot/mlp.hpp"

namespace agot {

// The five prompt-construction mechanisms, as interchangeable differentiable
// heads mapping an image feature to a prompt-token prefix.
enum class HeadKind { Fixed, CoOp, CoCoOp, CoTPT, AGoT };

std::string head_kind_name(HeadKind kind);
HeadKind head_kind_from_name(const std::string& name);  // ConfigError on unknown

// The phrase every prompt is initialized from.
inline constexpr const char* kInitPhrase = "a photo of a";

struct AgotConfig {
    std::size_t steps = 5;        // reasoning steps (chain length)
    std::size_t subnodes = 4;     // meta-prompt learners per step
    std::size_t prompt_len = 4;   // prompt tokens per node
    std::size_t embed_dim = 16;   // prompt embedding width, equals encoder d_e
    std::size_t feature_dim = 32; // encoder output width

    void validate() const;  // ConfigError when any extent is zero
};

// Convex mixing policy for the prompt flow step: either the trained
// controller (sigmoid of FlowControl) or a constant ratio for the
// fixed-ratio ablation.
struct FlowMode {
    bool dynamic = true;
    double fixed_ratio = 0.5;

    static FlowMode make_dynamic() { return FlowMode{true, 0.5}; }
    static FlowMode make_fixed(double ratio);  // ConfigError outside [0, 1]
    std::string to_string() const;
    static FlowMode parse(const std::string& text);
};

// Trainable state for one reasoning step.
struct AgotStepParams {
    std::vector<Tensor> subnode_prompts;  // R tensors of prompt_len x embed_dim
    Mlp3Params weight_net;                // feature_dim -> R
    Mlp3Params meta_net;                  // feature_dim -> prompt_len * embed_dim
    Mlp3Params flow_control;              // feature_dim -> 1
};

// Full trainable state of one AGoT head.
struct AgotParams {
    Tensor base_prompt;  // chain state before the first step
    std::vector<AgotStepParams> steps;

    static AgotParams init(const AgotConfig& cfg, std::size_t mlp_hidden,
                           const Tensor& phrase_embedding, std::uint64_t seed);
    AgotParams clone() const;
    void validate_against(const AgotConfig& cfg) const;
    // Deterministic naming: base_prompt, step<i>/subnode<r>, step<i>/weightnet/w1, ...
    std::vector<std::pair<std::string, Tensor>> named_tensors(bool include_flow_control) const;
};

// Prompt-token prefix handed to the text encoder, ahead of class tokens.
struct PromptOutput {
    Tensor tokens;                     // L' x embed_dim
    std::size_t meta_token_count = 0;  // appended conditional tokens (0 or 1)
};

// Per-step inspection record: aggregation weights and mixing ratio.
struct AgotStepTrace {
    std::vector<double> weights;
    double alpha = 0.0;
};

struct AgotStepResult {
    Tensor output;   // prompt_len x embed_dim
    Tensor weights;  // R, on the simplex
    Tensor alpha;    // scalar in (0,1); constant tensor in fixed mode
};

// Detached embeddings of the handcrafted phrase.
PromptOutput fixed_prompt(const Vocabulary& vocab, const TextEncoderParams& params);

// The learnable prompt itself.
PromptOutput coop_forward(const Tensor& prompt);

// Learnable prompt plus one image-conditioned token appended after it.
PromptOutput cocoop_forward(Tape& tape, const Tensor& prompt, const Mlp3Params& meta_net,
                            const Tensor& image_feature);

// One aggregation + fusion + flow step:
//   weights = softmax(WeightNet(feature))           (aggregation edges)
//   central = sum_r weights[r] * subnode_r          (prompt aggregation)
//   fused   = central + reshape(MetaNet(feature))   (visual fusion)
//   alpha   = sigmoid(FlowControl(feature))         (flow ratio)
//   output  = (1 - alpha) * prev + alpha * fused    (prompt flow)
AgotStepResult agot_step(Tape& tape, const Tensor& prev, const AgotStepParams& step,
                         const Tensor& image_feature, const FlowMode& mode,
                         const AgotConfig& cfg);

// Folds agot_step over all steps starting from base_prompt.
PromptOutput agot_forward(Tape& tape, const AgotParams& params, const AgotConfig& cfg,
                          const Tensor& image_feature, const FlowMode& mode,
                          std::vector<AgotStepTrace>* trace = nullptr);

// The single-subnode restriction of agot_forward.
PromptOutput cotpt_forward(Tape& tape, const AgotParams& params, const AgotConfig& cfg,
                           const Tensor& image_feature, const FlowMode& mode,
                           std::vector<AgotStepTrace>* trace = nullptr);

// [prompt tokens ; class-token embeddings]; class rows are detached.
Tensor build_text_sequence(Tape& tape, const PromptOutput& prompt,
                           const std::vector<int>& class_ids, const TextEncoderParams& params);

// Phrase embeddings as a trainable tensor of the requested length; rows
// beyond the phrase are Gaussian (seeded).
Tensor init_prompt_from_phrase(const Vocabulary& vocab, const TextEncoderParams& params,
                               std::size_t prompt_len, std::uint64_t seed);

}  // namespace agot
