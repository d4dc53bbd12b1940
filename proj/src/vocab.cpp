#include "agot/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace agot {

std::vector<std::string> split_lowercase_words(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                words.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!current.empty()) words.push_back(current);
    return words;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& texts, std::size_t embed_dim) {
    std::set<std::string> unique;
    for (const auto& text : texts) {
        for (auto& w : split_lowercase_words(text)) unique.insert(std::move(w));
    }
    unique.erase(kPadToken);
    unique.erase(kUnkToken);
    unique.erase(kClassToken);
    std::vector<std::string> tokens = {kPadToken, kUnkToken, kClassToken};
    tokens.insert(tokens.end(), unique.begin(), unique.end());
    return from_tokens(std::move(tokens), embed_dim);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, std::size_t embed_dim) {
    if (embed_dim == 0) throw ConfigError("vocabulary embed_dim must be positive");
    Vocabulary v;
    v.embed_dim_ = embed_dim;
    v.tokens_ = std::move(tokens);
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
        if (!v.ids_.emplace(v.tokens_[i], static_cast<int>(i)).second) {
            throw VocabError("duplicate token '" + v.tokens_[i] + "'");
        }
    }
    if (v.tokens_.size() < 3 || v.tokens_[0] != kPadToken || v.tokens_[1] != kUnkToken ||
        v.tokens_[2] != kClassToken) {
        throw VocabError("vocabulary must start with the reserved tokens");
    }
    return v;
}

bool Vocabulary::contains(const std::string& token) const { return ids_.count(token) > 0; }

int Vocabulary::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) throw VocabError("token '" + token + "' is not in the vocabulary");
    return it->second;
}

int Vocabulary::id_or_unk(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? unk_id() : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
        throw VocabError("token id " + std::to_string(id) + " out of range [0, " +
                         std::to_string(tokens_.size()) + ")");
    }
    return tokens_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (const auto& t : tokens_) out << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path, std::size_t embed_dim) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) tokens.push_back(line);
    return from_tokens(std::move(tokens), embed_dim);
}

std::vector<int> tokenize(const std::string& caption, const Vocabulary& vocab,
                          std::size_t max_tokens) {
    if (max_tokens == 0) throw ConfigError("tokenize: max_tokens must be positive");
    auto words = split_lowercase_words(caption);
    if (words.empty()) throw EmptyInputError("tokenize: empty caption");
    std::vector<int> ids;
    ids.reserve(max_tokens);
    for (const auto& w : words) {
        if (ids.size() == max_tokens) break;
        ids.push_back(vocab.id_or_unk(w));
    }
    while (ids.size() < max_tokens) ids.push_back(vocab.pad_id());
    return ids;
}

}  // namespace agot
