#include "cforge/pii.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "cforge/text.hpp"

namespace cforge {

namespace {

bool is_local_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '.' || c == '_' ||
           c == '%' || c == '+' || c == '-';
}

bool is_domain_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '.' || c == '-';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string lowered(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = lower(c);
    return out;
}

struct Match {
    PiiCategory category;
    CharRange range;
};

int category_rank(PiiCategory c) {
    switch (c) {
        case PiiCategory::KEY: return 0;
        case PiiCategory::EMAIL: return 1;
        case PiiCategory::IP_ADDRESS: return 2;
        case PiiCategory::PASSWORD: return 3;
        case PiiCategory::USERNAME: return 4;
        case PiiCategory::NAME: return 5;
    }
    return 6;
}

bool is_masked_token(std::string_view value) {
    static const std::array<PiiCategory, 6> kCats = {
        PiiCategory::EMAIL,    PiiCategory::NAME,     PiiCategory::IP_ADDRESS,
        PiiCategory::USERNAME, PiiCategory::PASSWORD, PiiCategory::KEY};
    for (PiiCategory c : kCats) {
        if (value == pii_token(c)) return true;
    }
    return false;
}

void find_emails(std::string_view text, std::vector<Match>& out) {
    for (size_t at = text.find('@'); at != std::string_view::npos;
         at = text.find('@', at + 1)) {
        size_t local_begin = at;
        while (local_begin > 0 && is_local_char(text[local_begin - 1])) --local_begin;
        if (local_begin == at) continue;
        if (local_begin > 0 && text[local_begin - 1] == '@') continue;

        size_t domain_end = at + 1;
        while (domain_end < text.size() && is_domain_char(text[domain_end])) ++domain_end;
        // Trim trailing punctuation that is not part of a hostname.
        while (domain_end > at + 1 &&
               (text[domain_end - 1] == '.' || text[domain_end - 1] == '-'))
            --domain_end;
        if (domain_end == at + 1) continue;

        std::string_view domain = text.substr(at + 1, domain_end - at - 1);
        size_t last_dot = domain.rfind('.');
        if (last_dot == std::string_view::npos) continue;
        std::string_view tld = domain.substr(last_dot + 1);
        if (tld.size() < 2) continue;
        bool tld_alpha = true;
        for (char c : tld) {
            if (std::isalpha(static_cast<unsigned char>(c)) == 0) tld_alpha = false;
        }
        if (!tld_alpha) continue;

        out.push_back({PiiCategory::EMAIL, {local_begin, domain_end}});
    }
}

// IPv4 only: dotted quads are checkable without context, unlike IPv6 strings
// which collide with hex literals and mangled symbols.
void find_ip_addresses(std::string_view text, std::vector<Match>& out) {
    size_t i = 0;
    while (i < text.size()) {
        if (!is_digit(text[i]) || (i > 0 && (is_digit(text[i - 1]) || text[i - 1] == '.' ||
                                             is_ident_char(text[i - 1])))) {
            ++i;
            continue;
        }
        size_t pos = i;
        bool ok = true;
        for (int octet = 0; octet < 4 && ok; ++octet) {
            if (octet > 0) {
                if (pos >= text.size() || text[pos] != '.') {
                    ok = false;
                    break;
                }
                ++pos;
            }
            size_t digits_begin = pos;
            int value = 0;
            while (pos < text.size() && is_digit(text[pos]) && pos - digits_begin < 3) {
                value = value * 10 + (text[pos] - '0');
                ++pos;
            }
            if (pos == digits_begin || value > 255) ok = false;
            if (pos - digits_begin > 1 && text[digits_begin] == '0') ok = false;
        }
        if (ok && pos < text.size() &&
            (is_digit(text[pos]) || text[pos] == '.' || is_ident_char(text[pos])))
            ok = false;
        if (ok) {
            out.push_back({PiiCategory::IP_ADDRESS, {i, pos}});
            i = pos;
        } else {
            ++i;
        }
    }
}

void find_pem_blocks(std::string_view text, std::vector<Match>& out) {
    static constexpr std::string_view kBegin = "-----BEGIN ";
    static constexpr std::string_view kEnd = "-----END ";
    size_t i = 0;
    while ((i = text.find(kBegin, i)) != std::string_view::npos) {
        size_t header_close = text.find("-----", i + kBegin.size());
        if (header_close == std::string_view::npos) break;
        std::string_view label =
            text.substr(i + kBegin.size(), header_close - i - kBegin.size());
        if (label.find("KEY") == std::string_view::npos) {
            i = header_close;
            continue;
        }
        size_t end_marker = text.find(kEnd, header_close);
        if (end_marker == std::string_view::npos) break;
        size_t end_close = text.find("-----", end_marker + kEnd.size());
        if (end_close == std::string_view::npos) break;
        out.push_back({PiiCategory::KEY, {i, end_close + 5}});
        i = end_close + 5;
    }
}

void find_aws_keys(std::string_view text, std::vector<Match>& out) {
    static constexpr std::string_view kPrefix = "AKIA";
    size_t i = 0;
    while ((i = text.find(kPrefix, i)) != std::string_view::npos) {
        if (i > 0 && is_ident_char(text[i - 1])) {
            ++i;
            continue;
        }
        size_t pos = i + kPrefix.size();
        size_t count = 0;
        while (pos < text.size() && count < 16 &&
               ((text[pos] >= 'A' && text[pos] <= 'Z') || is_digit(text[pos]))) {
            ++pos;
            ++count;
        }
        if (count == 16 && (pos == text.size() || !is_ident_char(text[pos]))) {
            out.push_back({PiiCategory::KEY, {i, pos}});
            i = pos;
        } else {
            ++i;
        }
    }
}

bool contains_any(std::string_view haystack, const std::vector<std::string_view>& needles) {
    for (std::string_view n : needles) {
        if (haystack.find(n) != std::string_view::npos) return true;
    }
    return false;
}

// Finds `<identifier> [:=] <value>` and reports the value range. The
// identifier may be quoted (JSON/YAML keys). Returns false when the
// position is not an assignment we want to touch.
struct Assignment {
    std::string ident_lower;
    CharRange value;     // excludes surrounding quotes
    bool value_quoted;
};

bool parse_assignment_at(std::string_view text, size_t op_pos, Assignment& out) {
    char op = text[op_pos];
    if (op == '=') {
        if (op_pos + 1 < text.size() && text[op_pos + 1] == '=') return false;
        if (op_pos > 0 && (text[op_pos - 1] == '=' || text[op_pos - 1] == '!' ||
                           text[op_pos - 1] == '<' || text[op_pos - 1] == '>'))
            return false;
    } else if (op == ':') {
        if (op_pos + 1 < text.size() && text[op_pos + 1] == ':') return false;
        if (op_pos > 0 && text[op_pos - 1] == ':') return false;
    } else {
        return false;
    }

    // Identifier on the left, optionally quoted.
    size_t left = op_pos;
    while (left > 0 && (text[left - 1] == ' ' || text[left - 1] == '\t')) --left;
    if (left == 0) return false;
    size_t ident_end = left;
    size_t ident_begin = left;
    if (text[left - 1] == '"' || text[left - 1] == '\'') {
        char q = text[left - 1];
        size_t open = text.rfind(q, left - 2);
        if (open == std::string_view::npos) return false;
        ident_begin = open + 1;
        ident_end = left - 1;
    } else {
        while (ident_begin > 0 && is_ident_char(text[ident_begin - 1])) --ident_begin;
        if (ident_begin == ident_end) return false;
    }
    out.ident_lower = lowered(text.substr(ident_begin, ident_end - ident_begin));

    // Value on the right.
    size_t vpos = op_pos + 1;
    while (vpos < text.size() && (text[vpos] == ' ' || text[vpos] == '\t')) ++vpos;
    if (vpos >= text.size() || text[vpos] == '\n') return false;
    if (text[vpos] == '"' || text[vpos] == '\'') {
        char q = text[vpos];
        size_t close = vpos + 1;
        while (close < text.size() && text[close] != q && text[close] != '\n') ++close;
        if (close >= text.size() || text[close] != q) return false;
        if (close == vpos + 1) return false;
        out.value = {vpos + 1, close};
        out.value_quoted = true;
    } else {
        size_t end = vpos;
        while (end < text.size()) {
            char c = text[end];
            if (std::isspace(static_cast<unsigned char>(c)) != 0 || c == ',' || c == ';' ||
                c == ')' || c == ']' || c == '}' || c == '"' || c == '\'' || c == '#')
                break;
            ++end;
        }
        if (end == vpos) return false;
        out.value = {vpos, end};
        out.value_quoted = false;
    }
    return true;
}

const std::vector<std::string_view>& key_ident_markers() {
    static const std::vector<std::string_view> kMarkers = {
        "api_key", "apikey",     "api-key",    "secret", "token",
        "access_key", "accesskey", "private_key", "auth_key"};
    return kMarkers;
}

const std::vector<std::string_view>& password_ident_markers() {
    static const std::vector<std::string_view> kMarkers = {"password", "passwd", "pwd",
                                                           "passphrase"};
    return kMarkers;
}

bool username_ident(std::string_view ident) {
    return ident == "username" || ident == "user_name" || ident == "login" ||
           ident == "login_name";
}

bool plausible_key_value(std::string_view value) {
    if (value.size() < 16) return false;
    for (char c : value) {
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '+' && c != '/' &&
            c != '=' && c != '_' && c != '-')
            return false;
    }
    return true;
}

void find_assignments(std::string_view text, const PiiConfig& cfg,
                      std::vector<Match>& out) {
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '=' && text[i] != ':') continue;
        Assignment a;
        if (!parse_assignment_at(text, i, a)) continue;
        std::string_view value = text.substr(a.value.begin, a.value.size());
        if (is_masked_token(value)) continue;

        if (cfg.detect_passwords && contains_any(a.ident_lower, password_ident_markers())) {
            out.push_back({PiiCategory::PASSWORD, a.value});
        } else if (cfg.detect_keys && contains_any(a.ident_lower, key_ident_markers())) {
            if (plausible_key_value(value)) out.push_back({PiiCategory::KEY, a.value});
        } else if (cfg.detect_usernames && username_ident(a.ident_lower)) {
            out.push_back({PiiCategory::USERNAME, a.value});
        }
    }
}

bool is_title_word(std::string_view w) {
    if (w.size() < 2) return false;
    if (w[0] < 'A' || w[0] > 'Z') return false;
    for (size_t i = 1; i < w.size(); ++i) {
        if (w[i] < 'a' || w[i] > 'z') return false;
    }
    return true;
}

// Narrow by design: only `author:`/`name:`/`by:` keys followed by a
// Title Case full name on the same line.
void find_names(std::string_view text, std::vector<Match>& out) {
    static const std::vector<std::string_view> kKeys = {"author", "name", "by"};
    for (size_t i = 0; i < text.size(); ++i) {
        for (std::string_view key : kKeys) {
            if (i + key.size() >= text.size()) continue;
            if (i > 0 && is_ident_char(text[i - 1])) continue;
            bool match = true;
            for (size_t k = 0; k < key.size(); ++k) {
                if (lower(text[i + k]) != key[k]) match = false;
            }
            if (!match) continue;
            size_t pos = i + key.size();
            if (pos >= text.size() || (text[pos] != ':' && text[pos] != '=')) continue;
            ++pos;
            while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
            if (pos < text.size() && (text[pos] == '"' || text[pos] == '\'')) ++pos;

            size_t name_begin = pos;
            size_t words = 0;
            size_t name_end = pos;
            while (words < 3) {
                size_t wbegin = pos;
                while (pos < text.size() &&
                       std::isalpha(static_cast<unsigned char>(text[pos])) != 0)
                    ++pos;
                if (!is_title_word(text.substr(wbegin, pos - wbegin))) break;
                ++words;
                name_end = pos;
                if (pos < text.size() && text[pos] == ' ' &&
                    pos + 1 < text.size() && text[pos + 1] >= 'A' && text[pos + 1] <= 'Z') {
                    ++pos;
                } else {
                    break;
                }
            }
            if (words >= 2) out.push_back({PiiCategory::NAME, {name_begin, name_end}});
        }
    }
}

}  // namespace

std::string_view pii_token(PiiCategory cat) {
    switch (cat) {
        case PiiCategory::EMAIL: return "<EMAIL>";
        case PiiCategory::NAME: return "<NAME>";
        case PiiCategory::IP_ADDRESS: return "<IP_ADDRESS>";
        case PiiCategory::USERNAME: return "<USERNAME>";
        case PiiCategory::PASSWORD: return "<PASSWORD>";
        case PiiCategory::KEY: return "<KEY>";
    }
    throw std::invalid_argument("unknown PII category");
}

MaskResult mask_pii(std::string_view text, const PiiConfig& cfg) {
    std::vector<Match> matches;
    if (cfg.detect_keys) {
        find_pem_blocks(text, matches);
        find_aws_keys(text, matches);
    }
    if (cfg.detect_emails) find_emails(text, matches);
    if (cfg.detect_ip_addresses) find_ip_addresses(text, matches);
    find_assignments(text, cfg, matches);
    if (cfg.detect_names) find_names(text, matches);

    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        if (a.range.begin != b.range.begin) return a.range.begin < b.range.begin;
        if (a.range.end != b.range.end) return a.range.end > b.range.end;
        return category_rank(a.category) < category_rank(b.category);
    });

    MaskResult result;
    std::string& out = result.text;
    out.reserve(text.size());
    size_t cursor = 0;
    for (const Match& m : matches) {
        if (m.range.begin < cursor) continue;  // overlap: first match wins
        out.append(text.substr(cursor, m.range.begin - cursor));
        out.append(pii_token(m.category));
        result.report.replacements.push_back({m.category, m.range});
        cursor = m.range.end;
    }
    out.append(text.substr(cursor));
    return result;
}

namespace {

size_t count_word_matches(std::string_view text_lower, std::string_view term_lower) {
    size_t count = 0;
    size_t i = 0;
    while ((i = text_lower.find(term_lower, i)) != std::string_view::npos) {
        bool left_ok = i == 0 || !is_ident_char(text_lower[i - 1]);
        size_t end = i + term_lower.size();
        bool right_ok = end == text_lower.size() || !is_ident_char(text_lower[end]);
        if (left_ok && right_ok) ++count;
        i = end;
    }
    return count;
}

}  // namespace

SensitivePruneResult sensitive_word_prune(const std::vector<Repository>& repos,
                                          const std::vector<std::string>& wordlist,
                                          double per_repo_freq_threshold) {
    if (per_repo_freq_threshold < 0.0)
        throw std::invalid_argument("sensitive-word threshold must be non-negative");
    std::vector<std::string> terms;
    terms.reserve(wordlist.size());
    for (const std::string& w : wordlist) {
        if (!w.empty()) terms.push_back(lowered(w));
    }

    SensitivePruneResult result;
    for (const Repository& repo : repos) {
        size_t matches = 0;
        size_t tokens = 0;
        for (const SourceFile& file : repo.files) {
            std::string content_lower = lowered(file.content);
            tokens += count_ws_tokens(file.content);
            for (const std::string& term : terms) {
                matches += count_word_matches(content_lower, term);
            }
        }
        double freq = tokens == 0 ? 0.0
                                  : static_cast<double>(matches) * 10000.0 /
                                        static_cast<double>(tokens);
        result.frequency_per_repo[repo.repo_id] = freq;
        if (freq > per_repo_freq_threshold) result.offending_owners.insert(repo.owner);
    }
    for (const Repository& repo : repos) {
        if (result.offending_owners.count(repo.owner) > 0)
            result.removed_repo_ids.push_back(repo.repo_id);
    }
    return result;
}

std::vector<std::string> load_wordlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open wordlist: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        words.push_back(line.substr(start));
    }
    return words;
}

}  // namespace cforge
