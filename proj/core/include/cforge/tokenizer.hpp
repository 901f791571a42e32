#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cforge {

using TokenId = std::uint32_t;

/// Tokenizer facade. Any lossless tokenizer can sit behind the pipeline;
/// the contract is decode(encode(t)) == t for arbitrary UTF-8 input.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::vector<TokenId> encode(std::string_view text) const = 0;
    virtual std::string decode(const std::vector<TokenId>& ids) const = 0;
    virtual std::size_t count(std::string_view text) const = 0;
    virtual std::string name() const = 0;
};

/// Default byte-level tokenizer: one token per byte, ids 0..255.
/// Trivially lossless, and count() is O(1).
class ByteTokenizer final : public Tokenizer {
public:
    std::vector<TokenId> encode(std::string_view text) const override {
        std::vector<TokenId> ids;
        ids.reserve(text.size());
        for (unsigned char c : text) ids.push_back(c);
        return ids;
    }

    std::string decode(const std::vector<TokenId>& ids) const override {
        std::string out;
        out.reserve(ids.size());
        for (TokenId id : ids) out.push_back(static_cast<char>(id & 0xFF));
        return out;
    }

    std::size_t count(std::string_view text) const override { return text.size(); }

    std::string name() const override { return "byte"; }
};

inline std::shared_ptr<const Tokenizer> default_tokenizer() {
    static const auto tok = std::make_shared<const ByteTokenizer>();
    return tok;
}

}  // namespace cforge
