#include "kgext/lexsim.hpp"

#include <algorithm>
#include <cmath>

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext::lexsim {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double ngram_dice(std::string_view a, std::string_view b, int n) {
    if (n < 1) throw InvalidArgumentError("n-gram size must be at least 1");
    auto ua = text::decode_utf8(a);
    auto ub = text::decode_utf8(b);
    if (ua.empty() && ub.empty()) return 1.0;
    auto grams = [n](const std::u32string& s) {
        std::map<std::u32string, std::size_t> out;
        const auto k = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i + k <= s.size(); ++i) ++out[s.substr(i, k)];
        return out;
    };
    auto ga = grams(ua);
    auto gb = grams(ub);
    std::size_t na = 0, nb = 0, common = 0;
    for (const auto& [g, c] : ga) na += c;
    for (const auto& [g, c] : gb) nb += c;
    if (na + nb == 0) return 0.0;
    for (const auto& [g, c] : ga) {
        auto it = gb.find(g);
        if (it != gb.end()) common += std::min(c, it->second);
    }
    return ratio(2 * common, na + nb);
}

double lcs_sim(std::string_view a, std::string_view b) {
    auto ua = text::decode_utf8(a);
    auto ub = text::decode_utf8(b);
    if (ua.empty() && ub.empty()) return 1.0;
    std::vector<std::size_t> prev(ub.size() + 1, 0), cur(ub.size() + 1, 0);
    for (std::size_t i = 1; i <= ua.size(); ++i) {
        for (std::size_t j = 1; j <= ub.size(); ++j) {
            cur[j] = ua[i - 1] == ub[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return ratio(2 * prev[ub.size()], ua.size() + ub.size());
}

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
    auto ua = text::decode_utf8(a);
    auto ub = text::decode_utf8(b);
    std::vector<std::size_t> prev(ub.size() + 1), cur(ub.size() + 1);
    for (std::size_t j = 0; j <= ub.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= ua.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= ub.size(); ++j) {
            std::size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[ub.size()];
}

double levenshtein_sim(std::string_view a, std::string_view b) {
    auto la = text::decode_utf8(a).size();
    auto lb = text::decode_utf8(b).size();
    auto longest = std::max(la, lb);
    if (longest == 0) return 1.0;
    return 1.0 - ratio(levenshtein_distance(a, b), longest);
}

double substring_sim(std::string_view a, std::string_view b) {
    auto ua = text::decode_utf8(a);
    auto ub = text::decode_utf8(b);
    if (ua.empty() && ub.empty()) return 1.0;
    std::vector<std::size_t> prev(ub.size() + 1, 0), cur(ub.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= ua.size(); ++i) {
        for (std::size_t j = 1; j <= ub.size(); ++j) {
            cur[j] = ua[i - 1] == ub[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return ratio(2 * best, ua.size() + ub.size());
}

int needleman_wunsch_score(std::string_view a, std::string_view b, const AlignmentScores& s) {
    auto ua = text::decode_utf8(a);
    auto ub = text::decode_utf8(b);
    std::vector<int> prev(ub.size() + 1), cur(ub.size() + 1);
    for (std::size_t j = 0; j <= ub.size(); ++j) prev[j] = static_cast<int>(j) * s.gap;
    for (std::size_t i = 1; i <= ua.size(); ++i) {
        cur[0] = static_cast<int>(i) * s.gap;
        for (std::size_t j = 1; j <= ub.size(); ++j) {
            int diag = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? s.match : s.mismatch);
            cur[j] = std::max({diag, prev[j] + s.gap, cur[j - 1] + s.gap});
        }
        std::swap(prev, cur);
    }
    return prev[ub.size()];
}

double needleman_wunsch_sim(std::string_view a, std::string_view b, const AlignmentScores& s) {
    auto longest = std::max(text::decode_utf8(a).size(), text::decode_utf8(b).size());
    if (longest == 0) return 1.0;
    int score = needleman_wunsch_score(a, b, s);
    if (score <= 0) return 0.0;
    return std::min(1.0, static_cast<double>(score) / static_cast<double>(longest * std::max(s.match, 1)));
}

TaxonomyStore TaxonomyStore::parse(std::string_view contents) {
    TaxonomyStore t;
    auto ls = text::lines(contents);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty() || line.front() == '#') continue;
        auto fields = text::split(ls[i], '\t');
        if (fields.size() != 2) {
            throw FormatError("taxonomy line " + std::to_string(i + 1) + ": expected child<TAB>parent");
        }
        auto child = text::to_lower_ascii(text::trim(fields[0]));
        auto parent = text::to_lower_ascii(text::trim(fields[1]));
        if (child.empty() || parent.empty()) {
            throw FormatError("taxonomy line " + std::to_string(i + 1) + ": empty term");
        }
        if (parent == "-") parent.clear();
        auto [it, inserted] = t.parent_.emplace(child, parent);
        if (!inserted && it->second != parent) {
            throw FormatError("taxonomy term '" + child + "' has two parents");
        }
    }
    // Parents mentioned only on the right-hand side become roots.
    std::vector<std::string> implicit;
    for (const auto& [c, p] : t.parent_) {
        if (!p.empty() && !t.parent_.count(p)) implicit.push_back(p);
    }
    for (const auto& p : implicit) t.parent_.emplace(p, "");

    for (const auto& [term, p] : t.parent_) {
        std::vector<std::string> chain;
        std::string cur = term;
        while (!t.depth_.count(cur)) {
            chain.push_back(cur);
            if (chain.size() > t.parent_.size()) throw CycleError("taxonomy cycle through '" + term + "'");
            const auto& up = t.parent_.at(cur);
            if (up.empty()) {
                t.depth_[cur] = 1;
                chain.pop_back();
                break;
            }
            cur = up;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            t.depth_[*it] = t.depth_.at(t.parent_.at(*it)) + 1;
        }
    }
    return t;
}

TaxonomyStore TaxonomyStore::load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
}

bool TaxonomyStore::contains(std::string_view term) const {
    return parent_.count(text::to_lower_ascii(term)) > 0;
}

int TaxonomyStore::depth(std::string_view term) const {
    auto it = depth_.find(text::to_lower_ascii(term));
    if (it == depth_.end()) throw UnknownIdError("term '" + std::string(term) + "' not in taxonomy");
    return it->second;
}

std::vector<std::string> TaxonomyStore::path_to_root(std::string_view term) const {
    std::vector<std::string> out;
    std::string cur = text::to_lower_ascii(term);
    if (!parent_.count(cur)) throw UnknownIdError("term '" + std::string(term) + "' not in taxonomy");
    while (!cur.empty()) {
        out.push_back(cur);
        cur = parent_.at(cur);
    }
    return out;
}

std::optional<std::string> TaxonomyStore::lca(std::string_view a, std::string_view b) const {
    if (!contains(a) || !contains(b)) return std::nullopt;
    auto pa = path_to_root(a);
    auto pb = path_to_root(b);
    std::set<std::string> sa(pa.begin(), pa.end());
    for (const auto& t : pb) {
        if (sa.count(t)) return t;
    }
    return std::nullopt;
}

EmbeddingStore EmbeddingStore::parse(std::string_view contents) {
    auto ls = text::lines(contents);
    std::size_t first = 0;
    while (first < ls.size() && text::trim(ls[first]).empty()) ++first;
    if (first == ls.size()) throw FormatError("embedding file is empty");
    auto header = text::split(std::string(text::trim(ls[first])), ' ');
    if (header.size() != 2) throw FormatError("embedding header must be 'count dim'");
    auto count = text::parse_int(header[0]);
    auto dim = text::parse_int(header[1]);
    if (count < 0 || dim <= 0) throw FormatError("embedding header has invalid count or dimension");
    EmbeddingStore e(static_cast<std::size_t>(dim));
    for (std::size_t i = first + 1; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty()) continue;
        std::vector<std::string> fields;
        for (auto& f : text::split(std::string(line), ' ')) {
            if (!f.empty()) fields.push_back(std::move(f));
        }
        if (fields.size() != e.dim_ + 1) {
            throw FormatError("embedding line " + std::to_string(i + 1) + " has " +
                              std::to_string(fields.size() - 1) + " components, expected " +
                              std::to_string(e.dim_));
        }
        std::vector<double> v;
        v.reserve(e.dim_);
        for (std::size_t k = 1; k < fields.size(); ++k) v.push_back(text::parse_double(fields[k]));
        e.add(fields[0], std::move(v));
    }
    if (e.size() != static_cast<std::size_t>(count)) {
        throw FormatError("embedding header announces " + std::to_string(count) + " vectors, found " +
                          std::to_string(e.size()));
    }
    return e;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
}

void EmbeddingStore::add(const std::string& token, std::vector<double> vec) {
    if (vec.size() != dim_) throw FormatError("vector for '" + token + "' has wrong dimension");
    for (double x : vec) {
        if (!std::isfinite(x)) throw NonFiniteError("vector for '" + token + "' has a non-finite component");
    }
    vectors_[text::to_lower_ascii(token)] = std::move(vec);
}

const std::vector<double>* EmbeddingStore::find(std::string_view token) const {
    auto it = vectors_.find(text::to_lower_ascii(token));
    return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<double> wu_palmer_terms(std::string_view a, std::string_view b, const TaxonomyStore& tax) {
    auto l = tax.lca(a, b);
    if (!l) return std::nullopt;
    return 2.0 * tax.depth(*l) / (tax.depth(a) + tax.depth(b));
}

std::optional<double> wu_palmer_sim(std::string_view a, std::string_view b, const TaxonomyStore& tax,
                                    const ingest::StopwordList& stopwords) {
    auto ta = ingest::normalize_label(a, stopwords);
    auto tb = ingest::normalize_label(b, stopwords);
    // Multi-word taxonomy entries are stored with single spaces.
    if (auto whole = wu_palmer_terms(text::join(ta, " "), text::join(tb, " "), tax)) return whole;
    std::optional<double> best;
    for (const auto& x : ta) {
        for (const auto& y : tb) {
            auto s = wu_palmer_terms(x, y, tax);
            if (s && (!best || *s > *best)) best = s;
        }
    }
    return best;
}

std::optional<double> embedding_cos(std::string_view a, std::string_view b, const EmbeddingStore& emb,
                                    const ingest::StopwordList& stopwords) {
    auto mean = [&](std::string_view label) -> std::optional<std::vector<double>> {
        std::vector<double> acc(emb.dim(), 0.0);
        std::size_t known = 0;
        for (const auto& tok : ingest::normalize_label(label, stopwords)) {
            if (const auto* v = emb.find(tok)) {
                for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += (*v)[k];
                ++known;
            }
        }
        if (known == 0) return std::nullopt;
        for (auto& x : acc) x /= static_cast<double>(known);
        return acc;
    };
    auto va = mean(a);
    auto vb = mean(b);
    if (!va || !vb) return std::nullopt;
    double dot = 0, na = 0, nb = 0;
    for (std::size_t k = 0; k < va->size(); ++k) {
        dot += (*va)[k] * (*vb)[k];
        na += (*va)[k] * (*va)[k];
        nb += (*vb)[k] * (*vb)[k];
    }
    if (na == 0 || nb == 0) return std::nullopt;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace kgext::lexsim
