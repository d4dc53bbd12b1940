#include "agot/heads.hpp"

#include <cmath>
#include <sstream>

namespace agot {

std::string head_kind_name(HeadKind kind) {
    switch (kind) {
        case HeadKind::Fixed: return "fixed";
        case HeadKind::CoOp: return "coop";
        case HeadKind::CoCoOp: return "cocoop";
        case HeadKind::CoTPT: return "cotpt";
        case HeadKind::AGoT: return "agot";
    }
    throw ConfigError("unreachable head kind");
}

HeadKind head_kind_from_name(const std::string& name) {
    if (name == "fixed") return HeadKind::Fixed;
    if (name == "coop") return HeadKind::CoOp;
    if (name == "cocoop") return HeadKind::CoCoOp;
    if (name == "cotpt") return HeadKind::CoTPT;
    if (name == "agot") return HeadKind::AGoT;
    throw ConfigError("unknown head '" + name + "' (expected fixed|coop|cocoop|cotpt|agot)");
}

void AgotConfig::validate() const {
    if (steps == 0) throw ConfigError("agot.Z must be at least 1");
    if (subnodes == 0) throw ConfigError("agot.R must be at least 1");
    if (prompt_len == 0) throw ConfigError("agot.L must be at least 1");
    if (embed_dim == 0 || feature_dim == 0) {
        throw ConfigError("model widths must be positive");
    }
}

FlowMode FlowMode::make_fixed(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw ConfigError("fixed flow ratio must lie in [0, 1], got " + std::to_string(ratio));
    }
    return FlowMode{false, ratio};
}

std::string FlowMode::to_string() const {
    if (dynamic) return "dynamic";
    std::ostringstream os;
    os << "fixed:" << fixed_ratio;
    return os.str();
}

FlowMode FlowMode::parse(const std::string& text) {
    if (text == "dynamic") return make_dynamic();
    const std::string prefix = "fixed:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            return make_fixed(std::stod(text.substr(prefix.size())));
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad fixed flow ratio in '" + text + "'");
        }
    }
    throw ConfigError("alpha mode must be 'dynamic' or 'fixed:<ratio>', got '" + text + "'");
}

AgotParams AgotParams::init(const AgotConfig& cfg, std::size_t mlp_hidden,
                            const Tensor& phrase_embedding, std::uint64_t seed) {
    cfg.validate();
    if (mlp_hidden == 0) throw ConfigError("mlp hidden width must be positive");
    if (phrase_embedding.rank() != 2 || phrase_embedding.shape()[0] != cfg.prompt_len ||
        phrase_embedding.shape()[1] != cfg.embed_dim) {
        throw DimensionError("base prompt init must be prompt_len x embed_dim");
    }
    AgotParams params;
    params.base_prompt = phrase_embedding.clone();
    params.base_prompt.set_requires_grad(true);

    const double sigma = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    for (std::size_t i = 0; i < cfg.steps; ++i) {
        Rng rng(mix_seed(seed, 0x5EED00 + i));
        AgotStepParams step;
        step.subnode_prompts.reserve(cfg.subnodes);
        for (std::size_t r = 0; r < cfg.subnodes; ++r) {
            step.subnode_prompts.push_back(
                Tensor::randn({cfg.prompt_len, cfg.embed_dim}, rng, sigma, true));
        }
        step.weight_net = Mlp3Params::init(cfg.feature_dim, mlp_hidden, cfg.subnodes, rng);
        step.meta_net =
            Mlp3Params::init(cfg.feature_dim, mlp_hidden, cfg.prompt_len * cfg.embed_dim, rng);
        step.flow_control = Mlp3Params::init(cfg.feature_dim, mlp_hidden, 1, rng);
        params.steps.push_back(std::move(step));
    }
    return params;
}

AgotParams AgotParams::clone() const {
    AgotParams copy;
    copy.base_prompt = base_prompt.clone();
    for (const auto& step : steps) {
        AgotStepParams s;
        for (const auto& p : step.subnode_prompts) s.subnode_prompts.push_back(p.clone());
        auto clone_mlp = [](const Mlp3Params& m) {
            Mlp3Params out;
            out.w1 = m.w1.clone();
            out.b1 = m.b1.clone();
            out.w2 = m.w2.clone();
            out.b2 = m.b2.clone();
            out.w3 = m.w3.clone();
            out.b3 = m.b3.clone();
            return out;
        };
        s.weight_net = clone_mlp(step.weight_net);
        s.meta_net = clone_mlp(step.meta_net);
        s.flow_control = clone_mlp(step.flow_control);
        copy.steps.push_back(std::move(s));
    }
    return copy;
}

void AgotParams::validate_against(const AgotConfig& cfg) const {
    cfg.validate();
    if (steps.size() != cfg.steps) {
        throw ConfigError("parameter set has " + std::to_string(steps.size()) +
                          " steps, config expects " + std::to_string(cfg.steps));
    }
    if (base_prompt.rank() != 2 || base_prompt.shape()[0] != cfg.prompt_len ||
        base_prompt.shape()[1] != cfg.embed_dim) {
        throw DimensionError("base prompt shape " + shape_str(base_prompt.shape()) +
                             " does not match config");
    }
    for (const auto& step : steps) {
        if (step.subnode_prompts.size() != cfg.subnodes) {
            throw ConfigError("step has " + std::to_string(step.subnode_prompts.size()) +
                              " subnodes, config expects " + std::to_string(cfg.subnodes));
        }
        for (const auto& p : step.subnode_prompts) {
            if (p.shape() != base_prompt.shape()) {
                throw DimensionError("subnode prompt shape mismatch");
            }
        }
        if (step.weight_net.out_dim() != cfg.subnodes ||
            step.weight_net.in_dim() != cfg.feature_dim) {
            throw DimensionError("weight net widths do not match config");
        }
        if (step.meta_net.out_dim() != cfg.prompt_len * cfg.embed_dim ||
            step.meta_net.in_dim() != cfg.feature_dim) {
            throw DimensionError("meta net widths do not match config");
        }
        if (step.flow_control.out_dim() != 1 || step.flow_control.in_dim() != cfg.feature_dim) {
            throw DimensionError("flow control widths do not match config");
        }
    }
}

std::vector<std::pair<std::string, Tensor>> AgotParams::named_tensors(
    bool include_flow_control) const {
    std::vector<std::pair<std::string, Tensor>> named;
    named.emplace_back("base_prompt", base_prompt);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string prefix = "step" + std::to_string(i);
        for (std::size_t r = 0; r < steps[i].subnode_prompts.size(); ++r) {
            named.emplace_back(prefix + "/subnode" + std::to_string(r),
                               steps[i].subnode_prompts[r]);
        }
        for (auto& entry : steps[i].weight_net.named_tensors(prefix + "/weightnet")) {
            named.push_back(std::move(entry));
        }
        for (auto& entry : steps[i].meta_net.named_tensors(prefix + "/metanet")) {
            named.push_back(std::move(entry));
        }
        if (include_flow_control) {
            for (auto& entry : steps[i].flow_control.named_tensors(prefix + "/flowcontrol")) {
                named.push_back(std::move(entry));
            }
        }
    }
    return named;
}

PromptOutput fixed_prompt(const Vocabulary& vocab, const TextEncoderParams& params) {
    std::vector<int> ids;
    for (const auto& word : split_lowercase_words(kInitPhrase)) {
        ids.push_back(vocab.id_of(word));  // VocabError when the phrase is missing
    }
    Tensor tokens = embed_tokens(ids, params);
    return PromptOutput{tokens, 0};
}

PromptOutput coop_forward(const Tensor& prompt) {
    if (prompt.rank() != 2) {
        throw DimensionError("coop prompt must be rank-2, got " + shape_str(prompt.shape()));
    }
    return PromptOutput{prompt, 0};
}

PromptOutput cocoop_forward(Tape& tape, const Tensor& prompt, const Mlp3Params& meta_net,
                            const Tensor& image_feature) {
    if (prompt.rank() != 2) {
        throw DimensionError("cocoop prompt must be rank-2, got " + shape_str(prompt.shape()));
    }
    if (meta_net.out_dim() != prompt.shape()[1]) {
        throw DimensionError("cocoop meta net output width " +
                             std::to_string(meta_net.out_dim()) +
                             " does not match prompt embedding width " +
                             std::to_string(prompt.shape()[1]));
    }
    Tensor conditional = mlp3_forward(tape, meta_net, image_feature);
    Tensor tokens = ops::concat_rows(tape, {prompt, conditional});
    return PromptOutput{tokens, 1};
}

AgotStepResult agot_step(Tape& tape, const Tensor& prev, const AgotStepParams& step,
                         const Tensor& image_feature, const FlowMode& mode,
                         const AgotConfig& cfg) {
    if (prev.rank() != 2 || prev.shape()[0] != cfg.prompt_len ||
        prev.shape()[1] != cfg.embed_dim) {
        throw DimensionError("agot_step: chain state shape " + shape_str(prev.shape()) +
                             " does not match config");
    }
    const std::size_t R = step.subnode_prompts.size();
    if (R == 0) throw ConfigError("agot_step: no subnode prompts");

    Tensor weights =
        ops::softmax_lastdim(tape, mlp3_forward(tape, step.weight_net, image_feature));

    // central = weights^T stacked over flattened subnode prompts
    std::vector<Tensor> flat;
    flat.reserve(R);
    for (const Tensor& p : step.subnode_prompts) {
        flat.push_back(ops::reshape(tape, p, {1, cfg.prompt_len * cfg.embed_dim}));
    }
    Tensor stacked = ops::concat_rows(tape, flat);
    Tensor central = ops::reshape(
        tape, ops::matmul(tape, ops::reshape(tape, weights, {1, R}), stacked),
        {cfg.prompt_len, cfg.embed_dim});

    Tensor visual = ops::reshape(tape, mlp3_forward(tape, step.meta_net, image_feature),
                                 {cfg.prompt_len, cfg.embed_dim});
    Tensor fused = ops::add(tape, central, visual);

    Tensor alpha = mode.dynamic
                       ? ops::sigmoid(tape, ops::reshape(
                                                tape, mlp3_forward(tape, step.flow_control,
                                                                   image_feature),
                                                {}))
                       : Tensor::scalar(mode.fixed_ratio);
    Tensor keep = ops::sub(tape, Tensor::scalar(1.0), alpha);
    Tensor output = ops::add(tape, ops::mul_scalar(tape, keep, prev),
                             ops::mul_scalar(tape, alpha, fused));
    return AgotStepResult{output, weights, alpha};
}

PromptOutput agot_forward(Tape& tape, const AgotParams& params, const AgotConfig& cfg,
                          const Tensor& image_feature, const FlowMode& mode,
                          std::vector<AgotStepTrace>* trace) {
    params.validate_against(cfg);
    if (image_feature.rank() != 1 || image_feature.shape()[0] != cfg.feature_dim) {
        throw DimensionError("agot_forward: image feature shape " +
                             shape_str(image_feature.shape()) + " does not match config");
    }
    Tensor state = params.base_prompt;
    for (const auto& step : params.steps) {
        AgotStepResult result = agot_step(tape, state, step, image_feature, mode, cfg);
        state = result.output;
        if (trace) {
            trace->push_back(AgotStepTrace{result.weights.data(), result.alpha.value()});
        }
    }
    return PromptOutput{state, 0};
}

PromptOutput cotpt_forward(Tape& tape, const AgotParams& params, const AgotConfig& cfg,
                           const Tensor& image_feature, const FlowMode& mode,
                           std::vector<AgotStepTrace>* trace) {
    if (cfg.subnodes != 1) {
        throw ConfigError("cotpt_forward requires agot.R == 1, got " +
                          std::to_string(cfg.subnodes));
    }
    return agot_forward(tape, params, cfg, image_feature, mode, trace);
}

Tensor build_text_sequence(Tape& tape, const PromptOutput& prompt,
                           const std::vector<int>& class_ids, const TextEncoderParams& params) {
    if (class_ids.empty()) throw EmptyInputError("build_text_sequence: empty class ids");
    Tensor class_rows = embed_tokens(class_ids, params);
    if (class_rows.shape()[1] != prompt.tokens.shape()[1]) {
        throw DimensionError("prompt and class embedding widths differ");
    }
    return ops::concat_rows(tape, {prompt.tokens, class_rows});
}

Tensor init_prompt_from_phrase(const Vocabulary& vocab, const TextEncoderParams& params,
                               std::size_t prompt_len, std::uint64_t seed) {
    if (prompt_len == 0) throw ConfigError("prompt length must be positive");
    std::vector<int> ids;
    for (const auto& word : split_lowercase_words(kInitPhrase)) {
        ids.push_back(vocab.id_or_unk(word));
    }
    Tensor phrase = embed_tokens(ids, params);
    const std::size_t width = phrase.shape()[1];
    std::vector<double> rows;
    rows.reserve(prompt_len * width);
    Rng rng(mix_seed(seed, 0x9127));
    for (std::size_t i = 0; i < prompt_len; ++i) {
        if (i < phrase.shape()[0]) {
            const auto& src = phrase.data();
            rows.insert(rows.end(), src.begin() + static_cast<std::ptrdiff_t>(i * width),
                        src.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
        } else {
            auto extra = rng.normal_vector(width, 1.0 / std::sqrt(static_cast<double>(width)));
            rows.insert(rows.end(), extra.begin(), extra.end());
        }
    }
    return Tensor::from_data({prompt_len, width}, std::move(rows), true);
}

}  // namespace agot
