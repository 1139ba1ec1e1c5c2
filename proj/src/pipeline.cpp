#include "kgext/pipeline.hpp"

#include "kgext/fca.hpp"
#include "kgext/parallel.hpp"

namespace kgext::pipeline {

recognizer::LexResources Resources::lex() const {
    recognizer::LexResources r;
    r.embeddings = embeddings ? &*embeddings : nullptr;
    r.taxonomy = taxonomy ? &*taxonomy : nullptr;
    r.stopwords = &stopwords;
    return r;
}

PairSet candidate_pairs(const KnowledgeGraph& a, const KnowledgeGraph& b, const AlignedPropertyPairs& pm,
                        const PairOptions& options, const Resources& res) {
    PairSet out;
    auto all = matcher::gen_pairs(a, b, options.kind);
    if (options.kind == PairKind::EtypeEtype) {
        if (!options.ps_threshold) {
            out.kept = std::move(all);
            return out;
        }
        std::vector<matcher::PrunedPair> dropped;
        out.kept = matcher::prune_schema(a, b, all, *options.ps_threshold, res.embeddings ? &*res.embeddings : nullptr,
                                         &dropped);
        for (auto& d : dropped) out.dropped.push_back(d.pair);
        return out;
    }
    if (!options.prune_instance) {
        out.kept = std::move(all);
        return out;
    }
    auto ctx_a = fca::formalize(a, fca::Scope::Schema);
    auto ctx_b = fca::formalize(b, fca::Scope::Instance);
    out.kept = matcher::prune_instance(all, pm, ctx_a, ctx_b, &out.dropped);
    return out;
}

SimBatch similarity(const KnowledgeGraph& a, const KnowledgeGraph& b, const std::vector<CandidatePair>& pairs,
                    const AlignedPropertyPairs& pm, const propsim::Params& params, unsigned threads) {
    bool instance = !pairs.empty() && pairs.front().kind == PairKind::EtypeEntity;
    auto ctx_a = fca::formalize(a, fca::Scope::Schema);
    auto ctx_b = fca::formalize(b, instance ? fca::Scope::Instance : fca::Scope::Schema);
    auto spec_a = propsim::SpecificityTable::build(a, params);
    auto spec_b = propsim::SpecificityTable::build(b, params);
    propsim::SimInputs in{&ctx_a, &ctx_b, &spec_a, &spec_b, &pm};
    auto raw = propsim::sim_raw(in, pairs, threads);
    auto norm = propsim::normalize_batch(raw);
    return {propsim::SimTable(std::move(raw), false), propsim::SimTable(std::move(norm), true)};
}

std::vector<recognizer::LabeledPair> features(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                              const std::vector<CandidatePair>& pairs, const SimBatch& sims,
                                              const Resources& res, unsigned threads) {
    std::vector<recognizer::LabeledPair> rows(pairs.size());
    auto lex = res.lex();
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        rows[i].pair = pairs[i];
        rows[i].features = recognizer::featurize(pairs[i], a, b, sims.normalized, lex);
    });
    return rows;
}

Recognition recognize(const KnowledgeGraph& a, const KnowledgeGraph& b, const AlignedPropertyPairs& pm,
                      const recognizer::TrainedModel& model, const RecognizeOptions& options, const Resources& res) {
    Recognition r;
    r.pairs = candidate_pairs(a, b, pm, options.pairs, res);
    r.sims = similarity(a, b, r.pairs.kept, pm, options.sim, options.threads);
    r.rows = features(a, b, r.pairs.kept, r.sims, res, options.threads);
    std::vector<recognizer::FeatureVector> fvs;
    fvs.reserve(r.rows.size());
    for (const auto& row : r.rows) fvs.push_back(row.features);
    r.alignments = recognizer::recognize(model, r.pairs.kept, fvs, options.cutoff, options.one_to_one);
    return r;
}

std::vector<recognizer::LabeledPair> training_rows(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                                   const AlignedPropertyPairs& pm, const std::vector<Alignment>& gold,
                                                   const RecognizeOptions& options, const Resources& res) {
    auto pairs = candidate_pairs(a, b, pm, options.pairs, res);
    auto sims = similarity(a, b, pairs.kept, pm, options.sim, options.threads);
    auto rows = features(a, b, pairs.kept, sims, res, options.threads);
    recognizer::attach_labels(rows, gold);
    return rows;
}

}  // namespace kgext::pipeline
