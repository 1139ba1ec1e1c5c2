#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kgext/alignment.hpp"
#include "kgext/labels.hpp"
#include "kgext/lexsim.hpp"
#include "kgext/matcher.hpp"
#include "kgext/model.hpp"
#include "kgext/propsim.hpp"
#include "kgext/recognizer.hpp"

namespace kgext::pipeline {

/// Loaded auxiliary files shared by the stages.
struct Resources {
    ingest::StopwordList stopwords = ingest::StopwordList::builtin();
    std::optional<lexsim::EmbeddingStore> embeddings;
    std::optional<lexsim::TaxonomyStore> taxonomy;

    recognizer::LexResources lex() const;
};

struct PairOptions {
    PairKind kind = PairKind::EtypeEtype;
    /// Pre-selection threshold for schema pairs; pruning is skipped when unset.
    std::optional<double> ps_threshold = 0.3;
    /// Instance pairs without a shared aligned property are dropped.
    bool prune_instance = true;
};

struct PairSet {
    std::vector<CandidatePair> kept;
    std::vector<CandidatePair> dropped;
};

/// Candidate generation followed by the pruning rule for the pair kind.
PairSet candidate_pairs(const KnowledgeGraph& a, const KnowledgeGraph& b, const AlignedPropertyPairs& pm,
                        const PairOptions& options, const Resources& res);

struct SimBatch {
    propsim::SimTable raw;
    propsim::SimTable normalized;
};

/// Raw and batch-normalized similarity triples for the pairs. Schema pairs
/// use entity type rows on both sides; instance pairs use entity rows on B.
SimBatch similarity(const KnowledgeGraph& a, const KnowledgeGraph& b, const std::vector<CandidatePair>& pairs,
                    const AlignedPropertyPairs& pm, const propsim::Params& params, unsigned threads = 1);

/// Feature rows over the normalized similarities, in pair order.
std::vector<recognizer::LabeledPair> features(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                              const std::vector<CandidatePair>& pairs, const SimBatch& sims,
                                              const Resources& res, unsigned threads = 1);

struct RecognizeOptions {
    PairOptions pairs;
    propsim::Params sim;
    double cutoff = 0.5;
    bool one_to_one = false;
    unsigned threads = 1;
};

struct Recognition {
    PairSet pairs;
    SimBatch sims;
    std::vector<recognizer::LabeledPair> rows;
    std::vector<Alignment> alignments;
};

/// Pairs, similarities, features and predictions in one pass.
Recognition recognize(const KnowledgeGraph& a, const KnowledgeGraph& b, const AlignedPropertyPairs& pm,
                      const recognizer::TrainedModel& model, const RecognizeOptions& options, const Resources& res);

/// Labeled feature rows for training on a graph pair with a gold alignment.
std::vector<recognizer::LabeledPair> training_rows(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                                   const AlignedPropertyPairs& pm, const std::vector<Alignment>& gold,
                                                   const RecognizeOptions& options, const Resources& res);

}  // namespace kgext::pipeline
