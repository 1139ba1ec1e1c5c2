#pragma once

#include <string>
#include <vector>

#include "kgext/alignment.hpp"
#include "kgext/fca.hpp"
#include "kgext/labels.hpp"
#include "kgext/lexsim.hpp"
#include "kgext/model.hpp"

namespace kgext::matcher {

struct MatchParams {
    double tau = 0.8;
    /// Accept every pair above tau instead of a greedy 1:1 selection.
    bool many_to_many = false;
    const lexsim::EmbeddingStore* embeddings = nullptr;
    unsigned threads = 1;
};

/// 1 when the normalized token lists are equal; otherwise the mean of bigram
/// Dice and Levenshtein similarity on the joined normalized labels, plus the
/// embedding cosine when both labels have known tokens.
double property_score(const Property& a, const Property& b, const lexsim::EmbeddingStore* embeddings = nullptr);

struct ScoredPair {
    std::string left;
    std::string right;
    double score = 0;
};

/// Greedy selection over scored pairs: descending score, ties by left then
/// right id; each id is used at most once per side. Pairs below `threshold`
/// are never selected. Output sorted by (left, right).
std::vector<ScoredPair> greedy_one_to_one(std::vector<ScoredPair> scored, double threshold);

AlignedPropertyPairs match_properties(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                      const MatchParams& params = {});

/// Full cross product: etypes(A) x etypes(B) or etypes(A) x entities(B), in
/// id order.
std::vector<CandidatePair> gen_pairs(const KnowledgeGraph& a, const KnowledgeGraph& b, PairKind kind);

/// Pre-selection factor: bigram Dice of the normalized labels plus their
/// embedding cosine (0 when unavailable).
double ps_s(const std::string& label_a, const std::string& label_b,
            const lexsim::EmbeddingStore* embeddings = nullptr,
            const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

struct PrunedPair {
    CandidatePair pair;
    double ps = 0;
};

/// Keeps etype-etype pairs with PS_s >= threshold. Dropped pairs go to
/// `dropped` when given.
std::vector<CandidatePair> prune_schema(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                        const std::vector<CandidatePair>& pairs, double threshold = 0.3,
                                        const lexsim::EmbeddingStore* embeddings = nullptr,
                                        std::vector<PrunedPair>* dropped = nullptr);

/// Keeps etype-entity pairs sharing at least one aligned property associated
/// (+1) on both sides.
std::vector<CandidatePair> prune_instance(const std::vector<CandidatePair>& pairs, const AlignedPropertyPairs& pm,
                                          const fca::FormalContext& ctx_a, const fca::FormalContext& ctx_b,
                                          std::vector<CandidatePair>* dropped = nullptr);

}  // namespace kgext::matcher
