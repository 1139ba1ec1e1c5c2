#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgext/labels.hpp"
#include "kgext/model.hpp"

namespace kgext::assess {

/// min-max scaling to [0,1]; a batch whose values are all equal maps to 0.5.
std::vector<double> minmax(const std::vector<double>& xs);

// ---------------------------------------------------------------------------
// Cue validity and Focus

/// 1/|dom(p)| when e is in dom(p) = K_v(p), else 0.
double cue_p(const KnowledgeGraph& g, const PropertyId& p, const EntityTypeId& e);
/// Sum of cue_p over prop(e).
double cue_e(const KnowledgeGraph& g, const EntityTypeId& e);
/// cue_e / |prop(e)|; throws EmptyPropertySetError when prop(e) is empty.
double cue_er(const KnowledgeGraph& g, const EntityTypeId& e);

struct CueRecord {
    std::string graph;
    EntityTypeId etype;
    double cue_e = 0;
    double cue_er = 0;
    double focus_e = 0;
};

struct EtypeRef {
    const KnowledgeGraph* graph = nullptr;
    EntityTypeId etype;
};

/// focus_e = minmax(ln(1 + cue_e)) + eta * minmax(cue_er) over the corpus.
/// Types without properties get cue_er = 0. Records follow corpus order.
std::vector<CueRecord> cue_records(const std::vector<EtypeRef>& corpus, double eta = 1.0);

/// cue_records ranked by focus_e descending, ties by (graph, etype).
std::vector<CueRecord> focus_e(const std::vector<EtypeRef>& corpus, double eta = 1.0);

/// Sum of cue_e over all entity types; throws EmptyGraphError when no entity
/// type has a property.
double cue_k(const KnowledgeGraph& g);
/// cue_k / sum of |prop(e)|.
double cue_kr(const KnowledgeGraph& g);
/// |prop(K)| / (max |prop(e)| * |etypes|); throws EmptyGraphError.
double balance(const KnowledgeGraph& g);

struct Query {
    std::vector<std::vector<std::string>> terms;
};

/// Comma-separated terms, each normalized like a label.
Query parse_query(std::string_view s, const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

struct GraphScore {
    std::string graph;
    double cue_k = 0;
    double cue_kr = 0;
    double focus_k = 0;
    double balance = 0;
    std::optional<double> cmm;
    std::optional<double> dem;
    std::optional<double> tfidf;
    std::optional<double> bm25;
};

/// focus_k = minmax(ln(1 + cue_k)) + mu * minmax(cue_kr) over the graphs,
/// ranked like focus_e.
std::vector<GraphScore> focus_k(const std::vector<const KnowledgeGraph*>& corpus, double mu = 1.0);

// ---------------------------------------------------------------------------
// Query-based rankings

enum class Match { None, Partial, Exact };

/// Exact when the normalized label equals the term, partial when the term's
/// tokens are a proper subset of the label tokens.
Match match_label(const std::vector<std::string>& label_tokens, const std::vector<std::string>& term);

/// Entity types matched (exactly or partially) by at least one query term.
std::vector<EntityTypeId> matched_etypes(const KnowledgeGraph& g, const Query& q,
                                         const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

/// (alpha * #exact + beta * #partial) / |Q|.
double cmm(const KnowledgeGraph& g, const Query& q, double alpha = 0.6, double beta = 0.4,
           const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

/// Mean over matched types of w * (|prop| + |superclasses| + |subclasses| + |siblings|).
double dem(const KnowledgeGraph& g, const Query& q, double w = 1.0,
           const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

/// Entity type labels of a graph as normalized token sequences.
std::vector<std::vector<std::string>> label_documents(const KnowledgeGraph& g,
                                                      const ingest::StopwordList& stopwords);

/// Occurrences of the term as a contiguous token run inside the labels.
std::size_t term_frequency(const std::vector<std::vector<std::string>>& labels, const std::vector<std::string>& term);

std::vector<double> tfidf(const std::vector<const KnowledgeGraph*>& corpus, const Query& q,
                          const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

std::vector<double> bm25(const std::vector<const KnowledgeGraph*>& corpus, const Query& q, double m = 1.2,
                         double b = 0.75, const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

// ---------------------------------------------------------------------------
// Knowledge lotus

struct LotusCell {
    std::vector<std::string> members;  // names of the sets forming this cell
    std::size_t count = 0;             // properties shared by exactly these sets
};

/// Venn cell counts for 2 to 5 named sets; one cell per non-empty subset,
/// ordered by subset bitmask. Throws TooManySetsError above 5.
std::vector<LotusCell> lotus_stats(const std::vector<std::pair<std::string, std::set<std::string>>>& sets);

std::string write_lotus_csv(const std::vector<LotusCell>& cells);

// ---------------------------------------------------------------------------
// Reports

struct AssessParams {
    double eta = 1.0;
    double mu = 1.0;
    double alpha = 0.6;
    double beta = 0.4;
    double dem_w = 1.0;
    double bm25_m = 1.2;
    double bm25_b = 0.75;
};

struct AssessmentReport {
    std::vector<CueRecord> etypes;
    std::vector<GraphScore> graphs;
    std::vector<std::string> query;
    std::vector<std::string> notes;
};

AssessmentReport assess_corpus(const std::vector<const KnowledgeGraph*>& corpus, const Query& q,
                               const AssessParams& params = {},
                               const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

std::string write_report_json(const AssessmentReport& r);
/// One table; column `level` is `etype` or `graph`, inapplicable cells empty.
std::string write_report_csv(const AssessmentReport& r);

}  // namespace kgext::assess
