#pragma once

#include <chrono>
#include <string_view>

#include "cforge/syntax.hpp"

namespace cforge::detail {

class Deadline {
  public:
    explicit Deadline(std::uint64_t timeout_ms)
        : end_(std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms)) {}

    bool expired() {
        if (++checks_ % 64 != 0) return hit_;
        if (!hit_ && std::chrono::steady_clock::now() >= end_) hit_ = true;
        return hit_;
    }
    bool hit() const { return hit_; }

  private:
    std::chrono::steady_clock::time_point end_;
    std::uint64_t checks_ = 0;
    bool hit_ = false;
};

struct ParserResult {
    SyntaxNode root;
    bool timed_out = false;
    std::string error_detail;  // first structural error, empty if none
};

ParserResult parse_cfamily(std::string_view text, Language lang, Deadline& deadline);
ParserResult parse_python(std::string_view text, Deadline& deadline);

/// Inserts an error leaf at the deepest node containing `begin`, keeping
/// the child-nesting invariant intact.
void insert_error_leaf(SyntaxNode& root, std::size_t begin, std::size_t end);

}  // namespace cforge::detail
