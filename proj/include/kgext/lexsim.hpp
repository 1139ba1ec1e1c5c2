#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgext/labels.hpp"

namespace kgext::lexsim {

// Character-level metrics operate on Unicode code points. Every metric is
// symmetric and returns 1 for two empty strings.

/// Dice coefficient over the multisets of character n-grams.
double ngram_dice(std::string_view a, std::string_view b, int n = 2);

/// 2 * |LCS| / (|a| + |b|), LCS being the longest common subsequence.
double lcs_sim(std::string_view a, std::string_view b);

std::size_t levenshtein_distance(std::string_view a, std::string_view b);

/// 1 - distance / max(|a|, |b|).
double levenshtein_sim(std::string_view a, std::string_view b);

/// 2 * |longest common substring| / (|a| + |b|).
double substring_sim(std::string_view a, std::string_view b);

struct AlignmentScores {
    int match = 1;
    int mismatch = -1;
    int gap = -1;
};

int needleman_wunsch_score(std::string_view a, std::string_view b, const AlignmentScores& s = {});

/// max(0, global alignment score) / max(|a|, |b|).
double needleman_wunsch_sim(std::string_view a, std::string_view b, const AlignmentScores& s = {});

/// Term forest with depths counted from 1 at the roots.
class TaxonomyStore {
public:
    TaxonomyStore() = default;

    /// `child<TAB>parent` lines; roots use `-` as parent. Terms are case-folded.
    /// Throws FormatError on malformed lines and CycleError on cycles.
    static TaxonomyStore parse(std::string_view contents);
    static TaxonomyStore load(const std::filesystem::path& path);

    bool contains(std::string_view term) const;
    int depth(std::string_view term) const;
    /// Ancestors from the term itself up to its root.
    std::vector<std::string> path_to_root(std::string_view term) const;
    std::optional<std::string> lca(std::string_view a, std::string_view b) const;
    std::size_t size() const { return parent_.size(); }

private:
    std::map<std::string, std::string> parent_;  // root -> ""
    std::map<std::string, int> depth_;
};

/// Word vectors keyed by case-folded token.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

    /// First line `count dim`, then `token v1 ... vdim`. Throws FormatError.
    static EmbeddingStore parse(std::string_view contents);
    static EmbeddingStore load(const std::filesystem::path& path);

    void add(const std::string& token, std::vector<double> vec);
    const std::vector<double>* find(std::string_view token) const;
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }

private:
    std::size_t dim_ = 0;
    std::map<std::string, std::vector<double>> vectors_;
};

/// Wu-Palmer over a single pair of taxonomy terms; absent if either is unknown.
std::optional<double> wu_palmer_terms(std::string_view a, std::string_view b, const TaxonomyStore& tax);

/// Label-level Wu-Palmer: the whole normalized label is tried first, then the
/// maximum over token pairs. Absent when nothing is found in the taxonomy.
std::optional<double> wu_palmer_sim(std::string_view a, std::string_view b, const TaxonomyStore& tax,
                                    const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

/// Cosine of the mean vectors of the normalized label tokens. Absent when a
/// side has no known token or a zero mean vector.
std::optional<double> embedding_cos(std::string_view a, std::string_view b, const EmbeddingStore& emb,
                                    const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

}  // namespace kgext::lexsim
