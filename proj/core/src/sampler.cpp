#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "cforge/sampler.hpp"
#include "cforge/syntax.hpp"
#include "cforge/text.hpp"

namespace cforge {

std::string to_string(OrderStrategy s) {
    switch (s) {
        case OrderStrategy::ContentSim: return "ContentSim";
        case OrderStrategy::PathSim: return "PathSim";
        case OrderStrategy::DepGraph: return "DepGraph";
        case OrderStrategy::Random: return "Random";
    }
    throw std::invalid_argument("to_string: bad OrderStrategy");
}

OrderStrategy order_strategy_from_string(std::string_view s) {
    if (s == "ContentSim") return OrderStrategy::ContentSim;
    if (s == "PathSim") return OrderStrategy::PathSim;
    if (s == "DepGraph") return OrderStrategy::DepGraph;
    if (s == "Random") return OrderStrategy::Random;
    throw std::invalid_argument("order_strategy_from_string: unknown strategy " + std::string(s));
}

StrategyDraw choose_strategy(RandomStream& rng) {
    double draw = rng.uniform();
    OrderStrategy s = draw < 0.3   ? OrderStrategy::ContentSim
                      : draw < 0.6 ? OrderStrategy::PathSim
                      : draw < 0.9 ? OrderStrategy::DepGraph
                                   : OrderStrategy::Random;
    return {s, draw};
}

// ------------------------------------------------------------ import graph

namespace {

std::string_view dir_of(std::string_view rel_path) {
    std::size_t slash = rel_path.rfind('/');
    return slash == std::string_view::npos ? std::string_view{} : rel_path.substr(0, slash);
}

std::string_view base_of(std::string_view p) {
    std::size_t slash = p.rfind('/');
    return slash == std::string_view::npos ? p : p.substr(slash + 1);
}

std::string_view trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Joins and normalizes "."/".."; nullopt when ".." escapes the root.
std::optional<std::string> join_normalized(std::string_view dir, std::string_view rel) {
    std::vector<std::string_view> parts;
    auto feed = [&](std::string_view p) -> bool {
        std::size_t i = 0;
        while (i <= p.size()) {
            std::size_t j = p.find('/', i);
            if (j == std::string_view::npos) j = p.size();
            std::string_view seg = p.substr(i, j - i);
            if (seg.empty() || seg == ".") {
            } else if (seg == "..") {
                if (parts.empty()) return false;
                parts.pop_back();
            } else {
                parts.push_back(seg);
            }
            i = j + 1;
        }
        return true;
    };
    if (!feed(dir) || !feed(rel)) return std::nullopt;
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += '/';
        out += parts[i];
    }
    return out;
}

class PathIndex {
  public:
    explicit PathIndex(const std::vector<SourceFile>& files) : files_(files) {
        for (std::size_t i = 0; i < files.size(); ++i) {
            exact_.emplace(files[i].rel_path, i);
            by_basename_.emplace(std::string(base_of(files[i].rel_path)), i);
        }
    }

    std::optional<std::size_t> lookup(std::string_view rel_path) const {
        auto it = exact_.find(std::string(rel_path));
        if (it == exact_.end()) return std::nullopt;
        return it->second;
    }

    /// Exact path, else the lexicographically smallest path ending in
    /// "/suffix".
    std::optional<std::size_t> lookup_suffix(std::string_view suffix) const {
        if (auto hit = lookup(suffix)) return hit;
        auto [lo, hi] = by_basename_.equal_range(std::string(base_of(suffix)));
        std::optional<std::size_t> best;
        for (auto it = lo; it != hi; ++it) {
            const std::string& path = files_[it->second].rel_path;
            if (path.size() <= suffix.size()) continue;
            if (path.compare(path.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
            if (path[path.size() - suffix.size() - 1] != '/') continue;
            if (!best || path < files_[*best].rel_path) best = it->second;
        }
        return best;
    }

  private:
    const std::vector<SourceFile>& files_;
    std::unordered_map<std::string, std::size_t> exact_;
    std::multimap<std::string, std::size_t> by_basename_;
};

void each_line(std::string_view text, const std::function<void(std::string_view)>& fn) {
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t j = text.find('\n', i);
        if (j == std::string_view::npos) j = text.size();
        fn(text.substr(i, j - i));
        if (j == text.size()) break;
        i = j + 1;
    }
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i <= s.size()) {
        std::size_t j = s.find(sep, i);
        if (j == std::string_view::npos) j = s.size();
        out.push_back(s.substr(i, j - i));
        if (j == s.size()) break;
        i = j + 1;
    }
    return out;
}

void resolve_python_module(const PathIndex& index, std::string_view file_dir, std::size_t dots,
                           const std::vector<std::string_view>& segments,
                           std::set<std::size_t>& out) {
    std::vector<std::string> roots;
    if (dots == 0) {
        roots.emplace_back("");
        if (!file_dir.empty()) roots.emplace_back(file_dir);
    } else {
        std::string up;
        for (std::size_t i = 1; i < dots; ++i) up += "../";
        auto base = join_normalized(file_dir, up);
        if (!base) return;
        roots.push_back(*base);
    }
    std::string tail;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i > 0) tail += '/';
        tail += segments[i];
    }
    for (const std::string& root : roots) {
        std::string path = root.empty() ? tail : root + (tail.empty() ? "" : "/") + tail;
        if (!path.empty()) {
            if (auto hit = index.lookup(path + ".py")) {
                out.insert(*hit);
                return;
            }
        }
        std::string init = path.empty() ? "__init__.py" : path + "/__init__.py";
        if (auto hit = index.lookup(init)) {
            out.insert(*hit);
            return;
        }
    }
}

void python_imports(const PathIndex& index, const SourceFile& file, std::set<std::size_t>& out) {
    std::string_view file_dir = dir_of(file.rel_path);
    each_line(file.content, [&](std::string_view raw) {
        std::string_view line = trim(raw);
        if (line.rfind("import ", 0) == 0) {
            for (std::string_view item : split_on(line.substr(7), ',')) {
                item = trim(item);
                std::size_t ws = item.find_first_of(" \t");
                if (ws != std::string_view::npos) item = item.substr(0, ws);
                if (item.empty()) continue;
                std::vector<std::string_view> segs = split_on(item, '.');
                resolve_python_module(index, file_dir, 0, segs, out);
            }
            return;
        }
        if (line.rfind("from ", 0) != 0) return;
        std::string_view rest = trim(line.substr(5));
        std::size_t imp = rest.find(" import ");
        if (imp == std::string_view::npos) return;
        std::string_view module = trim(rest.substr(0, imp));
        std::string_view names = rest.substr(imp + 8);
        std::size_t dots = 0;
        while (dots < module.size() && module[dots] == '.') ++dots;
        module = module.substr(dots);
        std::vector<std::string_view> segs;
        if (!module.empty()) segs = split_on(module, '.');
        std::string_view cleaned = names;
        std::size_t paren = cleaned.find('(');
        if (paren != std::string_view::npos) cleaned = cleaned.substr(paren + 1);
        bool any_name = false;
        for (std::string_view name : split_on(cleaned, ',')) {
            name = trim(name);
            std::size_t cut = name.find_first_of(" \t)");
            if (cut != std::string_view::npos) name = name.substr(0, cut);
            if (name.empty() || name == "*") continue;
            any_name = true;
            std::vector<std::string_view> with_name = segs;
            with_name.push_back(name);
            std::size_t before = out.size();
            resolve_python_module(index, file_dir, dots == 0 ? 0 : dots, with_name, out);
            if (out.size() == before) {
                resolve_python_module(index, file_dir, dots == 0 ? 0 : dots, segs, out);
            }
        }
        if (!any_name) resolve_python_module(index, file_dir, dots == 0 ? 0 : dots, segs, out);
    });
}

void java_imports(const PathIndex& index, const SourceFile& file, std::set<std::size_t>& out) {
    each_line(file.content, [&](std::string_view raw) {
        std::string_view line = trim(raw);
        if (line.rfind("import ", 0) != 0) return;
        std::string_view rest = trim(line.substr(7));
        if (rest.rfind("static ", 0) == 0) {
            rest = trim(rest.substr(7));
            std::size_t last_dot = rest.rfind('.');
            if (last_dot == std::string_view::npos) return;
            rest = rest.substr(0, last_dot);  // drop the member name
        }
        while (!rest.empty() && (rest.back() == ';' || rest.back() == ' ')) {
            rest.remove_suffix(1);
        }
        if (rest.empty() || rest.back() == '*') return;
        std::string path;
        for (std::string_view seg : split_on(rest, '.')) {
            if (!path.empty()) path += '/';
            path += seg;
        }
        path += ".java";
        if (auto hit = index.lookup_suffix(path)) {
            out.insert(*hit);
        } else if (auto base = index.lookup_suffix(std::string(base_of(path)))) {
            out.insert(*base);
        }
    });
}

void cpp_includes(const PathIndex& index, const SourceFile& file, std::set<std::size_t>& out) {
    std::string_view file_dir = dir_of(file.rel_path);
    each_line(file.content, [&](std::string_view raw) {
        std::string_view line = trim(raw);
        if (line.empty() || line[0] != '#') return;
        std::string_view rest = trim(line.substr(1));
        if (rest.rfind("include", 0) != 0) return;
        rest = trim(rest.substr(7));
        if (rest.size() < 2) return;
        char open = rest[0];
        char close = open == '<' ? '>' : open == '"' ? '"' : '\0';
        if (close == '\0') return;
        std::size_t end = rest.find(close, 1);
        if (end == std::string_view::npos) return;
        std::string_view inc = rest.substr(1, end - 1);
        if (inc.empty()) return;
        if (auto rel = join_normalized(file_dir, inc)) {
            if (auto hit = index.lookup(*rel)) {
                out.insert(*hit);
                return;
            }
        }
        if (auto hit = index.lookup(inc)) {
            out.insert(*hit);
            return;
        }
        if (auto hit = index.lookup_suffix(inc)) out.insert(*hit);
    });
}

void js_resolve(const PathIndex& index, std::string_view file_dir, std::string_view spec,
                std::set<std::size_t>& out) {
    if (spec.rfind("./", 0) != 0 && spec.rfind("../", 0) != 0) return;
    auto joined = join_normalized(file_dir, spec);
    if (!joined) return;
    for (const std::string& candidate :
         {*joined, *joined + ".js", *joined + "/index.js"}) {
        if (auto hit = index.lookup(candidate)) {
            out.insert(*hit);
            return;
        }
    }
}

void js_imports(const PathIndex& index, const SourceFile& file, std::set<std::size_t>& out) {
    std::string_view file_dir = dir_of(file.rel_path);
    each_line(file.content, [&](std::string_view raw) {
        std::string_view line = trim(raw);
        auto quoted_after = [&](std::size_t pos) -> std::string_view {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos >= line.size() || (line[pos] != '\'' && line[pos] != '"')) return {};
            char q = line[pos];
            std::size_t close = line.find(q, pos + 1);
            if (close == std::string_view::npos) return {};
            return line.substr(pos + 1, close - pos - 1);
        };
        for (std::size_t at = line.find("require("); at != std::string_view::npos;
             at = line.find("require(", at + 8)) {
            std::string_view spec = quoted_after(at + 8);
            if (!spec.empty()) js_resolve(index, file_dir, spec, out);
        }
        if (line.rfind("import ", 0) == 0 || line.rfind("export ", 0) == 0) {
            std::size_t from = line.find(" from ");
            if (from != std::string_view::npos) {
                std::string_view spec = quoted_after(from + 6);
                if (!spec.empty()) js_resolve(index, file_dir, spec, out);
            } else if (line.rfind("import ", 0) == 0) {
                std::string_view spec = quoted_after(7);
                if (!spec.empty()) js_resolve(index, file_dir, spec, out);
            }
        }
    });
}

}  // namespace

DependencyGraph build_dependency_graph(const std::vector<SourceFile>& files) {
    PathIndex index(files);
    DependencyGraph g;
    g.successors.resize(files.size());
    g.predecessors.resize(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::set<std::size_t> deps;
        switch (files[i].language.lang) {
            case Language::Python: python_imports(index, files[i], deps); break;
            case Language::Java: java_imports(index, files[i], deps); break;
            case Language::Cpp: cpp_includes(index, files[i], deps); break;
            case Language::JavaScript: js_imports(index, files[i], deps); break;
            default: break;
        }
        deps.erase(i);
        g.successors[i].assign(deps.begin(), deps.end());
        for (std::size_t d : deps) g.predecessors[d].push_back(i);
    }
    return g;
}

// ------------------------------------------------------------------ tf-idf

std::vector<SparseVector> tfidf_vectors(const std::vector<std::string_view>& docs) {
    std::unordered_map<std::string, std::uint32_t> vocab;
    std::vector<std::unordered_map<std::uint32_t, std::size_t>> counts(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const CodeToken& tok : lex_code(docs[d])) {
            if (tok.kind == CodeToken::Kind::Comment) continue;
            auto [it, _] =
                vocab.try_emplace(tok.text, static_cast<std::uint32_t>(vocab.size()));
            ++counts[d][it->second];
        }
    }
    std::vector<std::size_t> df(vocab.size(), 0);
    for (const auto& doc : counts) {
        for (const auto& [term, _] : doc) ++df[term];
    }
    double n = static_cast<double>(docs.size());
    std::vector<SparseVector> out(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        auto& entries = out[d].entries;
        entries.reserve(counts[d].size());
        for (const auto& [term, count] : counts[d]) {
            double idf = std::log((1.0 + n) / (1.0 + static_cast<double>(df[term]))) + 1.0;
            entries.emplace_back(term, static_cast<double>(count) * idf);
        }
        std::sort(entries.begin(), entries.end());
        double norm2 = 0.0;
        for (const auto& [_, w] : entries) norm2 += w * w;
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (auto& [_, w] : entries) w *= inv;
        }
    }
    return out;
}

// ------------------------------------------------------------------ k-means

namespace {

double norm2_of(const SparseVector& v) {
    double s = 0.0;
    for (const auto& [_, w] : v.entries) s += w * w;
    return s;
}

double dot_dense(const SparseVector& v, const std::vector<double>& dense) {
    double s = 0.0;
    for (const auto& [term, w] : v.entries) s += w * dense[term];
    return s;
}

}  // namespace

std::vector<std::size_t> kmeans_assign(const std::vector<SparseVector>& points, std::size_t k,
                                       RandomStream& rng) {
    const std::size_t n = points.size();
    if (k == 0 || k > n) throw std::invalid_argument("kmeans_assign: need 1 <= k <= |points|");
    std::uint32_t dim = 0;
    for (const auto& p : points) {
        if (!p.entries.empty()) dim = std::max(dim, p.entries.back().first + 1);
    }
    std::vector<double> point_norm2(n);
    for (std::size_t i = 0; i < n; ++i) point_norm2[i] = norm2_of(points[i]);

    std::vector<std::vector<double>> centroids;
    std::vector<double> centroid_norm2;
    auto set_centroid = [&](std::size_t slot, const SparseVector& p) {
        auto& c = centroids[slot];
        std::fill(c.begin(), c.end(), 0.0);
        for (const auto& [term, w] : p.entries) c[term] = w;
        centroid_norm2[slot] = norm2_of(p);
    };
    centroids.assign(k, std::vector<double>(dim, 0.0));
    centroid_norm2.assign(k, 0.0);

    // k-means++ seeding: first uniform, then D^2-weighted.
    set_centroid(0, points[rng.index(n)]);
    std::vector<double> d2(n);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (std::size_t j = 0; j < c; ++j) {
                double dist = point_norm2[i] + centroid_norm2[j] -
                              2.0 * dot_dense(points[i], centroids[j]);
                best = std::min(best, std::max(dist, 0.0));
            }
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.index(n);
        } else {
            double r = rng.uniform() * total;
            pick = n - 1;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        set_centroid(c, points[pick]);
    }

    std::vector<std::size_t> assign(n, 0);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best_j = 0;
            double best = std::numeric_limits<double>::max();
            for (std::size_t j = 0; j < k; ++j) {
                double dist = point_norm2[i] + centroid_norm2[j] -
                              2.0 * dot_dense(points[i], centroids[j]);
                if (dist < best) {
                    best = dist;
                    best_j = j;
                }
            }
            if (assign[i] != best_j) {
                assign[i] = best_j;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::vector<std::size_t> sizes(k, 0);
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            ++sizes[assign[i]];
            for (const auto& [term, w] : points[i].entries) sums[assign[i]][term] += w;
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (sizes[j] == 0) continue;  // empty cluster keeps its centroid
            double inv = 1.0 / static_cast<double>(sizes[j]);
            double norm2 = 0.0;
            for (std::uint32_t t = 0; t < dim; ++t) {
                centroids[j][t] = sums[j][t] * inv;
                norm2 += centroids[j][t] * centroids[j][t];
            }
            centroid_norm2[j] = norm2;
        }
    }
    return assign;
}

// ---------------------------------------------------------------- orderings

std::vector<std::size_t> order_by_content(const std::vector<SourceFile>& files, RandomStream& rng,
                                          std::optional<std::size_t> forced_k) {
    const std::size_t n = files.size();
    if (n == 0) throw std::invalid_argument("order_by_content: empty file list");
    std::size_t k = forced_k ? std::min(*forced_k, n)
                             : std::min<std::size_t>(rng.uniform_int(1, 20), n);
    std::vector<std::string_view> docs;
    docs.reserve(n);
    for (const auto& f : files) docs.emplace_back(f.content);
    std::vector<std::size_t> assign = kmeans_assign(tfidf_vectors(docs), k, rng);

    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < n; ++i) clusters[assign[i]].push_back(i);
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const auto& c) { return c.empty(); }),
                   clusters.end());
    rng.shuffle(clusters);
    std::vector<std::size_t> out;
    out.reserve(n);
    for (auto& cluster : clusters) {
        rng.shuffle(cluster);
        out.insert(out.end(), cluster.begin(), cluster.end());
    }
    return out;
}

std::vector<std::size_t> order_by_path(const std::vector<SourceFile>& files, RandomStream& rng) {
    const std::size_t n = files.size();
    if (n == 0) throw std::invalid_argument("order_by_path: empty file list");
    auto prefix_segments = [&](std::string_view a, std::string_view b) {
        std::vector<std::string_view> da = split_on(dir_of(a), '/');
        std::vector<std::string_view> db = split_on(dir_of(b), '/');
        if (dir_of(a).empty()) da.clear();
        if (dir_of(b).empty()) db.clear();
        std::size_t common = 0;
        while (common < da.size() && common < db.size() && da[common] == db[common]) ++common;
        return common;
    };

    std::vector<std::size_t> remaining(n);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
    std::vector<std::size_t> out;
    out.reserve(n);
    while (!remaining.empty()) {
        std::size_t m = remaining.size();
        if (m == 1) {
            out.push_back(remaining[0]);
            break;
        }
        std::size_t take = static_cast<std::size_t>(rng.uniform_int(1, m));
        std::size_t anchor_pos = rng.index(m);
        std::size_t anchor = remaining[anchor_pos];
        const std::string& anchor_path = files[anchor].rel_path;

        std::vector<std::size_t> others;
        others.reserve(m - 1);
        for (std::size_t idx : remaining) {
            if (idx != anchor) others.push_back(idx);
        }
        std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
            std::size_t pa = prefix_segments(anchor_path, files[a].rel_path);
            std::size_t pb = prefix_segments(anchor_path, files[b].rel_path);
            if (pa != pb) return pa > pb;
            std::size_t ea = levenshtein(anchor_path, files[a].rel_path);
            std::size_t eb = levenshtein(anchor_path, files[b].rel_path);
            if (ea != eb) return ea < eb;
            return files[a].rel_path < files[b].rel_path;
        });
        if (take > others.size()) take = others.size();

        std::set<std::size_t> emitted;
        for (std::size_t i = 0; i < take; ++i) {
            out.push_back(others[i]);
            emitted.insert(others[i]);
        }
        out.push_back(anchor);
        emitted.insert(anchor);
        std::vector<std::size_t> next;
        next.reserve(m - emitted.size());
        for (std::size_t idx : remaining) {
            if (emitted.count(idx) == 0) next.push_back(idx);
        }
        remaining = std::move(next);
    }
    return out;
}

namespace {

/// Iterative Tarjan; components numbered in completion order.
std::pair<std::vector<std::size_t>, std::size_t> strongly_connected(
    const std::vector<std::vector<std::size_t>>& succ) {
    const std::size_t n = succ.size();
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0, next_comp = 0;

    struct Frame {
        std::size_t node;
        std::size_t child;
    };
    for (std::size_t start = 0; start < n; ++start) {
        if (index[start] != kUnset) continue;
        std::vector<Frame> frames{{start, 0}};
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < succ[f.node].size()) {
                std::size_t w = succ[f.node][f.child++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            std::size_t v = f.node;
            frames.pop_back();
            if (!frames.empty()) {
                low[frames.back().node] = std::min(low[frames.back().node], low[v]);
            }
            if (low[v] == index[v]) {
                while (true) {
                    std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if (w == v) break;
                }
                ++next_comp;
            }
        }
    }
    return {comp, next_comp};
}

}  // namespace

std::vector<std::size_t> order_by_deps(const std::vector<SourceFile>& files, RandomStream& rng) {
    const std::size_t n = files.size();
    DependencyGraph g = build_dependency_graph(files);
    auto [comp, comp_count] = strongly_connected(g.successors);

    std::vector<std::vector<std::size_t>> members(comp_count);
    for (std::size_t i = 0; i < n; ++i) members[comp[i]].push_back(i);

    std::vector<std::set<std::size_t>> cond_succ(comp_count);
    std::vector<std::vector<std::size_t>> cond_pred(comp_count);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v : g.successors[u]) {
            if (comp[u] == comp[v]) continue;
            if (cond_succ[comp[u]].insert(comp[v]).second) {
                cond_pred[comp[v]].push_back(comp[u]);
            }
        }
    }

    // Peel components with no unemitted dependencies; ties break on the
    // smallest member file index so the order is seed-stable.
    std::vector<std::size_t> pending(comp_count);
    std::set<std::pair<std::size_t, std::size_t>> ready;
    for (std::size_t c = 0; c < comp_count; ++c) {
        pending[c] = cond_succ[c].size();
        if (pending[c] == 0) ready.insert({members[c].front(), c});
    }
    std::vector<std::size_t> out;
    out.reserve(n);
    while (!ready.empty()) {
        auto [_, c] = *ready.begin();
        ready.erase(ready.begin());
        rng.shuffle(members[c]);
        out.insert(out.end(), members[c].begin(), members[c].end());
        for (std::size_t p : cond_pred[c]) {
            if (--pending[p] == 0) ready.insert({members[p].front(), p});
        }
    }
    return out;
}

std::vector<std::size_t> random_order(std::size_t count, RandomStream& rng) {
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = i;
    rng.shuffle(out);
    return out;
}

OrderedRepo order_files(const Repository& repo, RandomStream& rng) {
    if (repo.files.empty()) throw std::invalid_argument("order_files: repo has no files");
    StrategyDraw draw = choose_strategy(rng);
    OrderedRepo out;
    out.strategy = draw;
    switch (draw.strategy) {
        case OrderStrategy::ContentSim: out.order = order_by_content(repo.files, rng); break;
        case OrderStrategy::PathSim: out.order = order_by_path(repo.files, rng); break;
        case OrderStrategy::DepGraph: out.order = order_by_deps(repo.files, rng); break;
        case OrderStrategy::Random: out.order = random_order(repo.files.size(), rng); break;
    }
    return out;
}

}  // namespace cforge
