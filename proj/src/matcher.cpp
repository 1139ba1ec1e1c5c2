#include "kgext/matcher.hpp"

#include <algorithm>
#include <set>

#include "kgext/errors.hpp"
#include "kgext/parallel.hpp"
#include "kgext/text.hpp"

namespace kgext::matcher {

double property_score(const Property& a, const Property& b, const lexsim::EmbeddingStore* embeddings) {
    if (a.normalized_label == b.normalized_label) return 1.0;
    auto ja = text::join(a.normalized_label, " ");
    auto jb = text::join(b.normalized_label, " ");
    double sum = lexsim::ngram_dice(ja, jb) + lexsim::levenshtein_sim(ja, jb);
    double n = 2;
    if (embeddings) {
        if (auto c = lexsim::embedding_cos(ja, jb, *embeddings)) {
            sum += *c;
            n += 1;
        }
    }
    return std::clamp(sum / n, 0.0, 1.0);
}

std::vector<ScoredPair> greedy_one_to_one(std::vector<ScoredPair> scored, double threshold) {
    std::sort(scored.begin(), scored.end(), [](const ScoredPair& x, const ScoredPair& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.left != y.left) return x.left < y.left;
        return x.right < y.right;
    });
    std::set<std::string> used_left, used_right;
    std::vector<ScoredPair> out;
    for (const auto& s : scored) {
        if (s.score < threshold) break;
        if (used_left.count(s.left) || used_right.count(s.right)) continue;
        used_left.insert(s.left);
        used_right.insert(s.right);
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const ScoredPair& x, const ScoredPair& y) {
        return std::tie(x.left, x.right) < std::tie(y.left, y.right);
    });
    return out;
}

AlignedPropertyPairs match_properties(const KnowledgeGraph& a, const KnowledgeGraph& b, const MatchParams& params) {
    std::vector<const Property*> pa, pb;
    for (const auto& [id, p] : a.properties()) pa.push_back(&p);
    for (const auto& [id, p] : b.properties()) pb.push_back(&p);
    std::vector<ScoredPair> scored(pa.size() * pb.size());
    parallel_for(pa.size(), params.threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < pb.size(); ++j) {
            scored[i * pb.size() + j] = {pa[i]->id, pb[j]->id, property_score(*pa[i], *pb[j], params.embeddings)};
        }
    });
    std::vector<ScoredPair> chosen;
    if (params.many_to_many) {
        for (const auto& s : scored) {
            if (s.score >= params.tau) chosen.push_back(s);
        }
    } else {
        chosen = greedy_one_to_one(std::move(scored), params.tau);
    }
    AlignedPropertyPairs out;
    for (const auto& s : chosen) out.push_back({s.left, s.right, Relation::Equivalent, s.score});
    return out;
}

std::vector<CandidatePair> gen_pairs(const KnowledgeGraph& a, const KnowledgeGraph& b, PairKind kind) {
    std::vector<CandidatePair> out;
    for (const auto& [l, e] : a.etypes()) {
        if (kind == PairKind::EtypeEtype) {
            for (const auto& [r, f] : b.etypes()) out.push_back({l, r, kind});
        } else {
            for (const auto& [r, i] : b.entities()) out.push_back({l, r, kind});
        }
    }
    return out;
}

double ps_s(const std::string& label_a, const std::string& label_b, const lexsim::EmbeddingStore* embeddings,
            const ingest::StopwordList& stopwords) {
    auto ja = ingest::normalized_text(label_a, stopwords);
    auto jb = ingest::normalized_text(label_b, stopwords);
    double s = lexsim::ngram_dice(ja, jb);
    if (embeddings) {
        if (auto c = lexsim::embedding_cos(ja, jb, *embeddings, stopwords)) s += *c;
    }
    return s;
}

std::vector<CandidatePair> prune_schema(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                        const std::vector<CandidatePair>& pairs, double threshold,
                                        const lexsim::EmbeddingStore* embeddings, std::vector<PrunedPair>* dropped) {
    std::vector<CandidatePair> kept;
    for (const auto& p : pairs) {
        if (p.kind != PairKind::EtypeEtype) throw InvalidArgumentError("prune_schema expects etype-etype pairs");
        double s = ps_s(a.etype(p.left).label, b.etype(p.right).label, embeddings);
        if (s >= threshold) {
            kept.push_back(p);
        } else if (dropped) {
            dropped->push_back({p, s});
        }
    }
    return kept;
}

std::vector<CandidatePair> prune_instance(const std::vector<CandidatePair>& pairs, const AlignedPropertyPairs& pm,
                                          const fca::FormalContext& ctx_a, const fca::FormalContext& ctx_b,
                                          std::vector<CandidatePair>* dropped) {
    std::vector<CandidatePair> kept;
    for (const auto& p : pairs) {
        if (p.kind != PairKind::EtypeEntity) throw InvalidArgumentError("prune_instance expects etype-entity pairs");
        auto ra = ctx_a.row_of({fca::ConceptKind::EntityType, p.left});
        auto rb = ctx_b.row_of({fca::ConceptKind::Entity, p.right});
        bool shared = false;
        for (const auto& al : pm) {
            if (!ctx_a.has_property(al.left) || !ctx_b.has_property(al.right)) continue;
            if (ctx_a.cell(ra, ctx_a.col_of(al.left)) == 1 && ctx_b.cell(rb, ctx_b.col_of(al.right)) == 1) {
                shared = true;
                break;
            }
        }
        if (shared) {
            kept.push_back(p);
        } else if (dropped) {
            dropped->push_back(p);
        }
    }
    return kept;
}

}  // namespace kgext::matcher
