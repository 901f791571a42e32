#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cforge/types.hpp"

namespace cforge {

enum class PiiCategory { EMAIL, NAME, IP_ADDRESS, USERNAME, PASSWORD, KEY };

/// The replacement token for a category, byte-exact ("<EMAIL>", ...).
std::string_view pii_token(PiiCategory cat);

struct PiiReplacement {
    PiiCategory category;
    CharRange original_range;  // range in the pre-masking text
};

struct PiiReport {
    std::vector<PiiReplacement> replacements;  // ascending, non-overlapping
};

struct PiiConfig {
    bool detect_emails = true;
    bool detect_ip_addresses = true;
    bool detect_keys = true;
    bool detect_passwords = true;
    bool detect_usernames = true;
    // Rule-based name detection is too imprecise for code corpora, so it
    // ships off; the flag exists for operators who want it anyway.
    bool detect_names = false;
};

struct MaskResult {
    std::string text;
    PiiReport report;
};

/// Replaces detected PII entities with their category tokens.
/// Idempotent: masking a masked text changes nothing.
MaskResult mask_pii(std::string_view text, const PiiConfig& cfg = {});

struct SensitivePruneResult {
    std::vector<std::string> removed_repo_ids;        // input order
    std::set<std::string> offending_owners;
    std::map<std::string, double> frequency_per_repo; // matches per 10k tokens
};

/// Removes repositories whose sensitive-word frequency (matches per 10k
/// whitespace-delimited tokens) strictly exceeds the threshold. When any
/// repository of an owner exceeds it, every repository of that owner is
/// removed.
SensitivePruneResult sensitive_word_prune(const std::vector<Repository>& repos,
                                          const std::vector<std::string>& wordlist,
                                          double per_repo_freq_threshold);

std::vector<std::string> load_wordlist(const std::string& path);

}  // namespace cforge
