#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cforge/sequence.hpp"
#include "cforge/text.hpp"

namespace cforge {

namespace {

constexpr char kEsc = '\x1B';

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string("ObjectiveMix: ") + name +
                                    " outside [0, 1]");
    }
}

}  // namespace

void ObjectiveMix::validate() const {
    check_prob(code_sfim, "code_sfim");
    check_prob(code_fim, "code_fim");
    check_prob(code_ntp, "code_ntp");
    check_prob(nl_fim, "nl_fim");
    check_prob(nl_ntp, "nl_ntp");
    check_prob(fim_psm, "fim_psm");
    check_prob(sfim_psm, "sfim_psm");
    if (std::abs(code_sfim + code_fim + code_ntp - 1.0) > 1e-9) {
        throw std::invalid_argument("ObjectiveMix: code distribution must sum to 1");
    }
    if (std::abs(nl_fim + nl_ntp - 1.0) > 1e-9) {
        throw std::invalid_argument("ObjectiveMix: NL distribution must sum to 1");
    }
}

void SentinelSet::validate() const {
    std::array<const std::string*, 4> all = {&pre, &suf, &mid, &eos};
    for (const std::string* a : all) {
        if (a->empty()) throw std::invalid_argument("SentinelSet: empty sentinel");
        if (a->find(kEsc) != std::string::npos) {
            throw std::invalid_argument("SentinelSet: sentinel contains ESC");
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = 0; j < all.size(); ++j) {
            if (i == j) continue;
            if (all[j]->size() >= all[i]->size() &&
                all[j]->compare(0, all[i]->size(), *all[i]) == 0) {
                throw std::invalid_argument(
                    "SentinelSet: one sentinel is a prefix of another");
            }
        }
    }
}

Objective choose_objective(DocKind kind, const ObjectiveMix& mix, RandomStream& rng) {
    double draw = rng.uniform();
    if (kind == DocKind::NL) {
        return draw < mix.nl_fim ? Objective::FIM : Objective::NTP;
    }
    if (draw < mix.code_sfim) return Objective::SFIM;
    if (draw < mix.code_sfim + mix.code_fim) return Objective::FIM;
    return Objective::NTP;
}

SerializationMode choose_mode(Objective o, const ObjectiveMix& mix, RandomStream& rng) {
    if (o == Objective::NTP) return SerializationMode::PSM;
    double psm = o == Objective::SFIM ? mix.sfim_psm : mix.fim_psm;
    return rng.uniform() < psm ? SerializationMode::PSM : SerializationMode::SPM;
}

SpanSelection ntp_span(std::string_view doc, std::string_view doc_ref) {
    SpanSelection s;
    s.doc_ref = std::string(doc_ref);
    s.prefix_range = {0, 0};
    s.middle_range = {0, doc.size()};
    s.suffix_range = {doc.size(), doc.size()};
    s.objective = Objective::NTP;
    s.mode = SerializationMode::PSM;
    return s;
}

std::optional<SpanSelection> select_fim_span(std::string_view doc, std::string_view doc_ref,
                                             RandomStream& rng) {
    std::vector<std::size_t> cps = codepoint_index(doc);
    std::size_t len = cps.size() - 1;
    if (len < 2) return std::nullopt;
    std::size_t max_middle = (len + 1) / 2;
    std::size_t middle_len = static_cast<std::size_t>(rng.uniform_int(1, max_middle));
    std::size_t start_cp = static_cast<std::size_t>(rng.uniform_int(0, len - middle_len));

    SpanSelection s;
    s.doc_ref = std::string(doc_ref);
    s.prefix_range = {0, cps[start_cp]};
    s.middle_range = {cps[start_cp], cps[start_cp + middle_len]};
    s.suffix_range = {cps[start_cp + middle_len], doc.size()};
    s.objective = Objective::FIM;
    return s;
}

namespace {

void collect_function_nodes(const SyntaxNode& node, std::vector<const SyntaxNode*>& out) {
    if (node.kind == "function_definition") {
        bool has_sig = false, has_block = false;
        for (const auto& c : node.children) {
            has_sig = has_sig || c.kind == "signature";
            has_block = has_block || c.kind == "block";
        }
        if (has_sig && has_block) out.push_back(&node);
    }
    for (const auto& c : node.children) collect_function_nodes(c, out);
}

void collect_interior(const SyntaxNode& node, bool is_root,
                      std::vector<const SyntaxNode*>& out) {
    if (!is_root && !node.children.empty()) out.push_back(&node);
    for (const auto& c : node.children) collect_interior(c, false, out);
}

std::size_t utf8_stride(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 1;
}

}  // namespace

std::optional<SfimPick> select_sfim_span(std::string_view doc, std::string_view doc_ref,
                                         const SyntaxNode& root, RandomStream& rng) {
    std::vector<const SyntaxNode*> roots;
    collect_function_nodes(root, roots);
    std::vector<OffsetFunctionTree> functions;
    functions.reserve(roots.size());
    for (const SyntaxNode* fn : roots) functions.push_back({fn, 0});
    return select_sfim_span(doc, doc_ref, functions, rng);
}

std::optional<SfimPick> select_sfim_span(std::string_view doc, std::string_view doc_ref,
                                         const std::vector<OffsetFunctionTree>& functions,
                                         RandomStream& rng) {
    if (functions.empty()) return std::nullopt;
    const OffsetFunctionTree& picked = functions[rng.index(functions.size())];
    const SyntaxNode* fn = picked.function;
    // Shifts a subtree-local range into document coordinates.
    auto shifted = [&](CharRange r) {
        return CharRange{static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r.begin) + picked.offset),
                         static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r.end) + picked.offset)};
    };

    std::vector<const SyntaxNode*> interior;
    collect_interior(*fn, true, interior);
    if (interior.empty()) return std::nullopt;
    const SyntaxNode* node = interior[rng.index(interior.size())];
    CharRange node_range = shifted(node->char_range);

    std::vector<std::size_t> line_ends;
    for (std::size_t e = node_range.begin + 1; e <= node_range.end; ++e) {
        if (is_line_end(doc, e)) line_ends.push_back(e);
    }
    if (line_ends.empty()) return std::nullopt;
    std::size_t end = line_ends[rng.index(line_ends.size())];

    std::vector<std::size_t> starts;
    for (std::size_t p = node_range.begin; p < end;
         p += utf8_stride(static_cast<unsigned char>(doc[p]))) {
        starts.push_back(p);
    }
    std::size_t start = starts[rng.index(starts.size())];

    SfimPick pick;
    pick.span.doc_ref = std::string(doc_ref);
    pick.span.prefix_range = {0, start};
    pick.span.middle_range = {start, end};
    pick.span.suffix_range = {end, doc.size()};
    pick.span.objective = Objective::SFIM;
    pick.span.span_meta = node->kind;
    pick.function_range = shifted(fn->char_range);
    pick.node_range = node_range;
    pick.node_kind = node->kind;
    return pick;
}

// ------------------------------------------------------------------ escaping

std::string escape_sentinels(std::string_view text, const SentinelSet& s,
                             std::size_t* collisions) {
    std::array<const std::string*, 4> sents = {&s.pre, &s.suf, &s.mid, &s.eos};
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == kEsc) {
            out.push_back(kEsc);
            out.push_back(kEsc);
            ++i;
            continue;
        }
        bool hit = false;
        for (const std::string* sp : sents) {
            if (text.compare(i, sp->size(), *sp) == 0) {
                out.push_back(kEsc);
                out.append(*sp);
                i += sp->size();
                if (collisions != nullptr) ++*collisions;
                hit = true;
                break;
            }
        }
        if (!hit) {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

std::string unescape_sentinels(std::string_view text, const SentinelSet& s) {
    std::array<const std::string*, 4> sents = {&s.pre, &s.suf, &s.mid, &s.eos};
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != kEsc) {
            for (const std::string* sp : sents) {
                if (text.compare(i, sp->size(), *sp) == 0) {
                    throw std::invalid_argument(
                        "unescape_sentinels: bare sentinel inside a segment");
                }
            }
            out.push_back(text[i]);
            ++i;
            continue;
        }
        if (i + 1 >= text.size()) {
            throw std::invalid_argument("unescape_sentinels: dangling escape");
        }
        bool matched = false;
        for (const std::string* sp : sents) {
            if (text.compare(i + 1, sp->size(), *sp) == 0) {
                out.append(*sp);
                i += 1 + sp->size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back(text[i + 1]);
            i += 2;
        }
    }
    return out;
}

std::size_t sentinel_overhead(const SentinelSet& s, const Tokenizer& tok, Objective o) {
    if (o == Objective::NTP) return tok.count(s.eos);
    return tok.count(s.pre) + tok.count(s.suf) + tok.count(s.mid) + tok.count(s.eos);
}

TrainingSequence serialize_sequence(std::string_view doc, const SpanSelection& span,
                                    const SentinelSet& s, const Tokenizer& tok,
                                    std::size_t* collisions) {
    if (!spans_partition_document(span, doc.size())) {
        throw std::invalid_argument("serialize_sequence: span does not partition the document");
    }
    auto seg = [&](CharRange r) {
        return escape_sentinels(doc.substr(r.begin, r.end - r.begin), s, collisions);
    };
    TrainingSequence out;
    out.objective = span.objective;
    out.mode = span.mode;
    out.source_doc = span.doc_ref;
    if (span.objective == Objective::NTP) {
        out.text_form = escape_sentinels(doc, s, collisions) + s.eos;
    } else if (span.mode == SerializationMode::PSM) {
        out.text_form = s.pre + seg(span.prefix_range) + s.suf + seg(span.suffix_range) +
                        s.mid + seg(span.middle_range) + s.eos;
    } else {
        out.text_form = s.suf + seg(span.suffix_range) + s.pre + seg(span.prefix_range) +
                        s.mid + seg(span.middle_range) + s.eos;
    }
    out.tokens = tok.encode(out.text_form);
    return out;
}

namespace {

/// Offset of the first bare (unescaped) sentinel at or after `from`;
/// `which` gets its index in {pre, suf, mid, eos}. npos when none.
std::size_t scan_to_sentinel(std::string_view text, std::size_t from, const SentinelSet& s,
                             int& which) {
    std::array<const std::string*, 4> sents = {&s.pre, &s.suf, &s.mid, &s.eos};
    std::size_t i = from;
    while (i < text.size()) {
        if (text[i] == kEsc) {
            if (i + 1 >= text.size()) {
                throw std::invalid_argument("deserialize_sequence: dangling escape");
            }
            bool matched = false;
            for (const std::string* sp : sents) {
                if (text.compare(i + 1, sp->size(), *sp) == 0) {
                    i += 1 + sp->size();
                    matched = true;
                    break;
                }
            }
            if (!matched) i += 2;
            continue;
        }
        for (std::size_t k = 0; k < sents.size(); ++k) {
            if (text.compare(i, sents[k]->size(), *sents[k]) == 0) {
                which = static_cast<int>(k);
                return i;
            }
        }
        ++i;
    }
    which = -1;
    return std::string_view::npos;
}

}  // namespace

DeserializedSequence deserialize_sequence(std::string_view text_form, const SentinelSet& s) {
    DeserializedSequence out;
    auto expect = [&](std::size_t at, int want, const char* what) -> std::size_t {
        int which = -1;
        std::size_t pos = scan_to_sentinel(text_form, at, s, which);
        if (pos != at || which != want) {
            throw std::invalid_argument(std::string("deserialize_sequence: expected ") + what);
        }
        std::array<const std::string*, 4> sents = {&s.pre, &s.suf, &s.mid, &s.eos};
        return at + sents[static_cast<std::size_t>(want)]->size();
    };
    auto segment_until = [&](std::size_t from, int want, const char* what,
                             std::size_t& next) -> std::string {
        int which = -1;
        std::size_t pos = scan_to_sentinel(text_form, from, s, which);
        if (pos == std::string_view::npos || which != want) {
            throw std::invalid_argument(std::string("deserialize_sequence: expected ") + what);
        }
        std::array<const std::string*, 4> sents = {&s.pre, &s.suf, &s.mid, &s.eos};
        next = pos + sents[static_cast<std::size_t>(want)]->size();
        return unescape_sentinels(text_form.substr(from, pos - from), s);
    };

    int first = -1;
    std::size_t first_pos = scan_to_sentinel(text_form, 0, s, first);
    if (first_pos == 0 && first == 0) {  // PSM
        std::size_t at = expect(0, 0, "pre sentinel");
        std::size_t next = 0;
        out.prefix = segment_until(at, 1, "suf sentinel", next);
        out.suffix = segment_until(next, 2, "mid sentinel", next);
        out.middle = segment_until(next, 3, "eos sentinel", next);
        if (next != text_form.size()) {
            throw std::invalid_argument("deserialize_sequence: trailing bytes after eos");
        }
        out.objective = Objective::FIM;
        out.mode = SerializationMode::PSM;
    } else if (first_pos == 0 && first == 1) {  // SPM
        std::size_t at = expect(0, 1, "suf sentinel");
        std::size_t next = 0;
        out.suffix = segment_until(at, 0, "pre sentinel", next);
        out.prefix = segment_until(next, 2, "mid sentinel", next);
        out.middle = segment_until(next, 3, "eos sentinel", next);
        if (next != text_form.size()) {
            throw std::invalid_argument("deserialize_sequence: trailing bytes after eos");
        }
        out.objective = Objective::FIM;
        out.mode = SerializationMode::SPM;
    } else {  // NTP
        std::size_t next = 0;
        out.middle = segment_until(0, 3, "eos sentinel", next);
        if (next != text_form.size()) {
            throw std::invalid_argument("deserialize_sequence: trailing bytes after eos");
        }
        out.objective = Objective::NTP;
        out.mode = SerializationMode::PSM;
    }
    out.document = out.prefix + out.middle + out.suffix;
    return out;
}

void append_token_record(std::ostream& out, const std::vector<std::uint32_t>& tokens) {
    auto put_u32 = [&](std::uint32_t v) {
        char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
        out.write(b, 4);
    };
    put_u32(static_cast<std::uint32_t>(tokens.size()));
    for (std::uint32_t t : tokens) put_u32(t);
}

std::vector<std::vector<std::uint32_t>> read_token_records(std::istream& in) {
    std::vector<std::vector<std::uint32_t>> out;
    auto get_u32 = [&](std::uint32_t& v) -> bool {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
        v = static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
            static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
        return true;
    };
    std::uint32_t count = 0;
    while (get_u32(count)) {
        std::vector<std::uint32_t> rec(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            if (!get_u32(rec[i])) {
                throw std::invalid_argument("read_token_records: truncated record");
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace cforge
