#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cforge/rng.hpp"
#include "cforge/syntax.hpp"
#include "cforge/tokenizer.hpp"
#include "cforge/types.hpp"

namespace cforge {

enum class DocKind { Code, NL };

/// Objective and serialization-mode mixing probabilities.
struct ObjectiveMix {
    double code_sfim = 0.70;
    double code_fim = 0.15;
    double code_ntp = 0.15;
    double nl_fim = 0.50;
    double nl_ntp = 0.50;
    double fim_psm = 0.50;   // SPM gets the rest
    double sfim_psm = 0.30;

    /// Throws std::invalid_argument unless every value is a probability
    /// and the code / NL distributions each sum to 1.
    void validate() const;
};

/// Reserved separator strings. None may be empty, contain ESC (0x1B),
/// or be a prefix of another (left-to-right parsing must be unambiguous).
struct SentinelSet {
    std::string pre = "<PRE>";
    std::string suf = "<SUF>";
    std::string mid = "<MID>";
    std::string eos = "<EOS>";

    void validate() const;
};

Objective choose_objective(DocKind kind, const ObjectiveMix& mix, RandomStream& rng);

/// PSM/SPM draw for FIM and SFIM; NTP always reports PSM (unused).
SerializationMode choose_mode(Objective o, const ObjectiveMix& mix, RandomStream& rng);

/// Whole-document span, objective NTP.
SpanSelection ntp_span(std::string_view doc, std::string_view doc_ref);

/// Uniform middle: length in [1, ceil(len/2)] codepoints, start uniform
/// over feasible positions. nullopt when the document has fewer than 2
/// codepoints (caller degrades to NTP).
std::optional<SpanSelection> select_fim_span(std::string_view doc, std::string_view doc_ref,
                                             RandomStream& rng);

struct SfimPick {
    SpanSelection span;
    CharRange function_range;
    CharRange node_range;
    std::string node_kind;
};

/// Single-draw syntax-aware middle: uniform function, then uniform
/// non-root non-leaf node inside it, then a uniform eligible line end
/// and a uniform codepoint start before it. nullopt (fallback to FIM)
/// when the tree has no function, the function has no interior node, or
/// the drawn node contains no line end; no redraws.
std::optional<SfimPick> select_sfim_span(std::string_view doc, std::string_view doc_ref,
                                         const SyntaxNode& root, RandomStream& rng);

/// A function subtree offered to SFIM selection when the document is a
/// window onto a larger stream (chunked file concatenation). `offset`
/// shifts the subtree's file-relative ranges into document coordinates;
/// the shifted function range must lie inside [0, doc size].
struct OffsetFunctionTree {
    const SyntaxNode* function = nullptr;
    std::ptrdiff_t offset = 0;
};

std::optional<SfimPick> select_sfim_span(std::string_view doc, std::string_view doc_ref,
                                         const std::vector<OffsetFunctionTree>& functions,
                                         RandomStream& rng);

/// ESC-doubling escape: 0x1B -> 0x1B 0x1B, sentinel -> 0x1B + sentinel.
/// `collisions` (optional) is incremented per escaped sentinel occurrence.
std::string escape_sentinels(std::string_view text, const SentinelSet& s,
                             std::size_t* collisions = nullptr);
std::string unescape_sentinels(std::string_view text, const SentinelSet& s);

/// Token cost of the sentinels alone for one sequence of this objective.
std::size_t sentinel_overhead(const SentinelSet& s, const Tokenizer& tok, Objective o);

/// PSM: pre+prefix+suf+suffix+mid+middle+eos. SPM: suf+suffix+pre+prefix+
/// mid+middle+eos. NTP: document+eos. Segments are sentinel-escaped.
TrainingSequence serialize_sequence(std::string_view doc, const SpanSelection& span,
                                    const SentinelSet& s, const Tokenizer& tok,
                                    std::size_t* collisions = nullptr);

struct DeserializedSequence {
    // SFIM serializes exactly like FIM, so this is NTP or FIM.
    Objective objective = Objective::NTP;
    SerializationMode mode = SerializationMode::PSM;
    std::string prefix;
    std::string middle;
    std::string suffix;
    std::string document;  // prefix + middle + suffix in document order
};

/// Inverse of serialize_sequence; throws std::invalid_argument on
/// malformed layout.
DeserializedSequence deserialize_sequence(std::string_view text_form, const SentinelSet& s);

/// Binary token sidecar: little-endian u32 count, then that many
/// little-endian u32 ids, records back to back.
void append_token_record(std::ostream& out, const std::vector<std::uint32_t>& tokens);
std::vector<std::vector<std::uint32_t>> read_token_records(std::istream& in);

}  // namespace cforge
