#include "cforge/license.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

#include "cforge/text.hpp"

namespace cforge {

namespace {

struct LicensePattern {
    const char* spdx_id;
    // All phrases must appear in the normalized text. Order in the table
    // matters: more specific licenses come first.
    std::vector<const char*> phrases;
};

// Keyphrases lifted from the canonical license texts, normalized the
// same way the input is.
const std::vector<LicensePattern>& patterns() {
    static const std::vector<LicensePattern> table = {
        {"AGPL-3.0-only", {"gnu affero general public license"}},
        {"LGPL-3.0-only", {"gnu lesser general public license", "version 3"}},
        {"LGPL-2.1-only", {"gnu lesser general public license", "version 2 1"}},
        {"GPL-3.0-only", {"gnu general public license", "version 3"}},
        {"GPL-2.0-only", {"gnu general public license", "version 2"}},
        {"MPL-2.0", {"mozilla public license", "version 2 0"}},
        {"Apache-2.0", {"apache license", "version 2 0", "licensed under the apache license"}},
        {"Apache-2.0", {"apache license", "version 2 0 january 2004"}},
        {"BSD-3-Clause",
         {"redistribution and use in source and binary forms",
          "neither the name"}},
        {"BSD-2-Clause", {"redistribution and use in source and binary forms"}},
        {"MIT",
         {"permission is hereby granted free of charge to any person obtaining a copy"}},
        {"ISC",
         {"permission to use copy modify and or distribute this software for any purpose"}},
        {"Zlib", {"this software is provided as is", "altered source versions"}},
        {"Unlicense", {"this is free and unencumbered software released into the public domain"}},
        {"CC0-1.0", {"cc0", "public domain dedication"}},
        {"BSL-1.0", {"boost software license"}},
        {"WTFPL", {"do what the fuck you want to public license"}},
    };
    return table;
}

}  // namespace

const std::set<std::string>& default_permissive_licenses() {
    static const std::set<std::string> ids = {
        "MIT",          "MIT-0",     "Apache-2.0", "BSD-2-Clause", "BSD-3-Clause",
        "BSD-3-Clause-Clear", "ISC", "Zlib",       "Unlicense",    "CC0-1.0",
        "0BSD",         "BSL-1.0",   "WTFPL",      "Artistic-2.0", "Python-2.0",
        "PostgreSQL",   "NCSA",      "UPL-1.0",    "BlueOak-1.0.0",
    };
    return ids;
}

std::set<std::string> load_spdx_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spdx list: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        std::size_t i = 0;
        while (i < line.size() && line[i] == ' ') ++i;
        line = line.substr(i);
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

LicenseVerdict classify_license(const std::optional<std::string>& declared,
                                const std::optional<std::string>& license_file_text,
                                const std::set<std::string>& permissive_list) {
    if (permissive_list.empty())
        throw std::invalid_argument("permissive_list must be non-empty");

    if (declared && !declared->empty()) {
        LicenseVerdict v;
        v.spdx_id = *declared;
        v.permissive = permissive_list.count(*declared) > 0;
        v.source = LicenseSource::DeclaredMetadata;
        return v;
    }
    if (license_file_text && !license_file_text->empty()) {
        std::string norm = normalize_for_matching(*license_file_text);
        for (const auto& pat : patterns()) {
            bool all = true;
            for (const char* phrase : pat.phrases) {
                if (norm.find(phrase) == std::string::npos) {
                    all = false;
                    break;
                }
            }
            if (all) {
                LicenseVerdict v;
                v.spdx_id = pat.spdx_id;
                v.permissive = permissive_list.count(v.spdx_id) > 0;
                v.source = LicenseSource::DetectedFromText;
                return v;
            }
        }
    }
    return LicenseVerdict{};  // Unknown, non-permissive
}

}  // namespace cforge
