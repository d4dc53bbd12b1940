#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "agot/errors.hpp"

namespace agot {

// Token table with dense ids. Ids 0..2 are reserved: [pad] fills short
// sequences, [unk] absorbs unseen tokens, [class] is the slot placeholder
// usable in caption templates.
class Vocabulary {
public:
    static constexpr const char* kPadToken = "[pad]";
    static constexpr const char* kUnkToken = "[unk]";
    static constexpr const char* kClassToken = "[class]";

    Vocabulary() = default;

    // Lowercases and whitespace-splits every text, dedupes, sorts, and adds
    // the reserved tokens up front.
    static Vocabulary build(const std::vector<std::string>& texts, std::size_t embed_dim);
    static Vocabulary from_tokens(std::vector<std::string> tokens, std::size_t embed_dim);

    std::size_t size() const { return tokens_.size(); }
    std::size_t embed_dim() const { return embed_dim_; }
    int pad_id() const { return 0; }
    int unk_id() const { return 1; }
    int class_slot_id() const { return 2; }

    bool contains(const std::string& token) const;
    int id_of(const std::string& token) const;  // VocabError when missing
    int id_or_unk(const std::string& token) const;
    const std::string& token_of(int id) const;  // VocabError when out of range

    // One token per line; the line number is the id.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path, std::size_t embed_dim);

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
    std::size_t embed_dim_ = 0;
};

// Lowercased whitespace tokenization, capped and padded to max_tokens.
// Unknown words map to [unk]; an empty caption is an error.
std::vector<int> tokenize(const std::string& caption, const Vocabulary& vocab,
                          std::size_t max_tokens);

std::vector<std::string> split_lowercase_words(const std::string& text);

}  // namespace agot
