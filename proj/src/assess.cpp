#include "kgext/assess.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <json.hpp>

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext::assess {

namespace {

std::size_t property_mass(const KnowledgeGraph& g) {
    std::size_t total = 0;
    for (const auto& [id, e] : g.etypes()) total += g.prop(id).size();
    return total;
}

double idf(std::size_t n, std::size_t df) {
    return df == 0 ? 0.0 : std::log(static_cast<double>(n) / static_cast<double>(df));
}

std::string opt(const std::optional<double>& v) { return v ? text::format_double(*v) : ""; }

}  // namespace

std::vector<double> minmax(const std::vector<double>& xs) {
    std::vector<double> out(xs.size(), 0.5);
    if (xs.empty()) return out;
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*hi > *lo) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - *lo) / (*hi - *lo);
    }
    return out;
}

double cue_p(const KnowledgeGraph& g, const PropertyId& p, const EntityTypeId& e) {
    g.etype(e);
    const auto& dom = g.k_v(p);
    if (!dom.count(e)) return 0.0;
    return 1.0 / static_cast<double>(dom.size());
}

double cue_e(const KnowledgeGraph& g, const EntityTypeId& e) {
    double s = 0;
    for (const auto& p : g.prop(e)) s += cue_p(g, p, e);
    return s;
}

double cue_er(const KnowledgeGraph& g, const EntityTypeId& e) {
    const auto& props = g.prop(e);
    if (props.empty()) throw EmptyPropertySetError("entity type '" + e + "' has no properties");
    return cue_e(g, e) / static_cast<double>(props.size());
}

std::vector<CueRecord> cue_records(const std::vector<EtypeRef>& corpus, double eta) {
    std::vector<CueRecord> out;
    std::vector<double> logs, ratios;
    for (const auto& ref : corpus) {
        CueRecord r;
        r.graph = ref.graph->name();
        r.etype = ref.etype;
        r.cue_e = cue_e(*ref.graph, ref.etype);
        r.cue_er = ref.graph->prop(ref.etype).empty() ? 0.0 : cue_er(*ref.graph, ref.etype);
        logs.push_back(std::log1p(r.cue_e));
        ratios.push_back(r.cue_er);
        out.push_back(std::move(r));
    }
    auto a = minmax(logs), b = minmax(ratios);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].focus_e = a[i] + eta * b[i];
    return out;
}

std::vector<CueRecord> focus_e(const std::vector<EtypeRef>& corpus, double eta) {
    auto out = cue_records(corpus, eta);
    std::stable_sort(out.begin(), out.end(), [](const CueRecord& x, const CueRecord& y) {
        if (x.focus_e != y.focus_e) return x.focus_e > y.focus_e;
        return std::tie(x.graph, x.etype) < std::tie(y.graph, y.etype);
    });
    return out;
}

double cue_k(const KnowledgeGraph& g) {
    if (property_mass(g) == 0) throw EmptyGraphError("graph '" + g.name() + "' has no entity type with properties");
    double s = 0;
    for (const auto& [id, e] : g.etypes()) s += cue_e(g, id);
    return s;
}

double cue_kr(const KnowledgeGraph& g) {
    double k = cue_k(g);
    return k / static_cast<double>(property_mass(g));
}

double balance(const KnowledgeGraph& g) {
    if (property_mass(g) == 0) throw EmptyGraphError("graph '" + g.name() + "' has no entity type with properties");
    std::set<PropertyId> all;
    std::size_t widest = 0;
    for (const auto& [id, e] : g.etypes()) {
        const auto& p = g.prop(id);
        all.insert(p.begin(), p.end());
        widest = std::max(widest, p.size());
    }
    return static_cast<double>(all.size()) / (static_cast<double>(widest) * static_cast<double>(g.etypes().size()));
}

Query parse_query(std::string_view s, const ingest::StopwordList& stopwords) {
    Query q;
    for (const auto& part : text::split(s, ',')) {
        auto t = text::trim(part);
        if (t.empty()) continue;
        q.terms.push_back(ingest::normalize_label(t, stopwords));
    }
    return q;
}

std::vector<GraphScore> focus_k(const std::vector<const KnowledgeGraph*>& corpus, double mu) {
    std::vector<GraphScore> out;
    std::vector<double> logs, ratios;
    for (const auto* g : corpus) {
        GraphScore s;
        s.graph = g->name();
        s.cue_k = cue_k(*g);
        s.cue_kr = cue_kr(*g);
        s.balance = balance(*g);
        logs.push_back(std::log1p(s.cue_k));
        ratios.push_back(s.cue_kr);
        out.push_back(std::move(s));
    }
    auto a = minmax(logs), b = minmax(ratios);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].focus_k = a[i] + mu * b[i];
    std::stable_sort(out.begin(), out.end(), [](const GraphScore& x, const GraphScore& y) {
        if (x.focus_k != y.focus_k) return x.focus_k > y.focus_k;
        return x.graph < y.graph;
    });
    return out;
}

Match match_label(const std::vector<std::string>& label_tokens, const std::vector<std::string>& term) {
    if (term.empty()) return Match::None;
    if (label_tokens == term) return Match::Exact;
    std::set<std::string> l(label_tokens.begin(), label_tokens.end());
    for (const auto& t : term) {
        if (!l.count(t)) return Match::None;
    }
    return Match::Partial;
}

std::vector<EntityTypeId> matched_etypes(const KnowledgeGraph& g, const Query& q,
                                         const ingest::StopwordList& stopwords) {
    std::vector<EntityTypeId> out;
    for (const auto& [id, e] : g.etypes()) {
        auto toks = ingest::normalize_label(e.label, stopwords);
        for (const auto& t : q.terms) {
            if (match_label(toks, t) != Match::None) {
                out.push_back(id);
                break;
            }
        }
    }
    return out;
}

double cmm(const KnowledgeGraph& g, const Query& q, double alpha, double beta, const ingest::StopwordList& stopwords) {
    if (q.terms.empty()) return 0.0;
    std::vector<std::vector<std::string>> labels;
    for (const auto& [id, e] : g.etypes()) labels.push_back(ingest::normalize_label(e.label, stopwords));
    double s = 0;
    for (const auto& t : q.terms) {
        Match best = Match::None;
        for (const auto& l : labels) best = std::max(best, match_label(l, t));
        if (best == Match::Exact) s += alpha;
        else if (best == Match::Partial) s += beta;
    }
    return s / static_cast<double>(q.terms.size());
}

double dem(const KnowledgeGraph& g, const Query& q, double w, const ingest::StopwordList& stopwords) {
    auto matched = matched_etypes(g, q, stopwords);
    if (matched.empty()) return 0.0;
    double total = 0;
    for (const auto& c : matched) {
        const auto& e = g.etype(c);
        std::set<EntityTypeId> siblings;
        for (const auto& parent : e.superclasses) {
            for (const auto& s : g.subclasses(parent)) {
                if (s != c) siblings.insert(s);
            }
        }
        double aspects = static_cast<double>(g.prop(c).size() + e.superclasses.size() + g.subclasses(c).size() +
                                             siblings.size());
        total += w * aspects;
    }
    return total / static_cast<double>(matched.size());
}

std::vector<std::vector<std::string>> label_documents(const KnowledgeGraph& g, const ingest::StopwordList& stopwords) {
    std::vector<std::vector<std::string>> out;
    for (const auto& [id, e] : g.etypes()) out.push_back(ingest::normalize_label(e.label, stopwords));
    return out;
}

std::size_t term_frequency(const std::vector<std::vector<std::string>>& labels, const std::vector<std::string>& term) {
    if (term.empty()) return 0;
    std::size_t n = 0;
    for (const auto& l : labels) {
        if (l.size() < term.size()) continue;
        for (std::size_t i = 0; i + term.size() <= l.size(); ++i) {
            if (std::equal(term.begin(), term.end(), l.begin() + static_cast<std::ptrdiff_t>(i))) ++n;
        }
    }
    return n;
}

std::vector<double> tfidf(const std::vector<const KnowledgeGraph*>& corpus, const Query& q,
                          const ingest::StopwordList& stopwords) {
    std::vector<std::vector<std::vector<std::string>>> docs;
    for (const auto* g : corpus) docs.push_back(label_documents(*g, stopwords));
    std::vector<double> out(corpus.size(), 0.0);
    for (const auto& t : q.terms) {
        std::vector<std::size_t> tf(docs.size());
        std::size_t df = 0;
        for (std::size_t d = 0; d < docs.size(); ++d) {
            tf[d] = term_frequency(docs[d], t);
            df += tf[d] > 0;
        }
        double w = idf(docs.size(), df);
        for (std::size_t d = 0; d < docs.size(); ++d) out[d] += static_cast<double>(tf[d]) * w;
    }
    return out;
}

std::vector<double> bm25(const std::vector<const KnowledgeGraph*>& corpus, const Query& q, double m, double b,
                         const ingest::StopwordList& stopwords) {
    std::vector<std::vector<std::vector<std::string>>> docs;
    std::vector<double> len;
    double avg = 0;
    for (const auto* g : corpus) {
        docs.push_back(label_documents(*g, stopwords));
        double l = 0;
        for (const auto& lab : docs.back()) l += static_cast<double>(lab.size());
        len.push_back(l);
        avg += l;
    }
    std::vector<double> out(corpus.size(), 0.0);
    if (corpus.empty()) return out;
    avg /= static_cast<double>(corpus.size());
    for (const auto& t : q.terms) {
        std::vector<double> tf(docs.size());
        std::size_t df = 0;
        for (std::size_t d = 0; d < docs.size(); ++d) {
            tf[d] = static_cast<double>(term_frequency(docs[d], t));
            df += tf[d] > 0;
        }
        double w = idf(docs.size(), df);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            if (tf[d] == 0) continue;
            double norm = avg > 0 ? len[d] / avg : 1.0;
            out[d] += w * (tf[d] * (m + 1)) / (tf[d] + m * (1 - b + b * norm));
        }
    }
    return out;
}

std::vector<LotusCell> lotus_stats(const std::vector<std::pair<std::string, std::set<std::string>>>& sets) {
    if (sets.size() > 5) throw TooManySetsError("knowledge lotus supports at most 5 sets, got " + std::to_string(sets.size()));
    if (sets.size() < 2) throw InvalidArgumentError("knowledge lotus needs at least 2 sets");
    std::map<std::string, unsigned> membership;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (const auto& p : sets[i].second) membership[p] |= 1u << i;
    }
    const unsigned cells = (1u << sets.size()) - 1;
    std::vector<LotusCell> out(cells);
    for (unsigned mask = 1; mask <= cells; ++mask) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (mask & (1u << i)) out[mask - 1].members.push_back(sets[i].first);
        }
    }
    for (const auto& [p, mask] : membership) ++out[mask - 1].count;
    return out;
}

std::string write_lotus_csv(const std::vector<LotusCell>& cells) {
    std::string out = "sets,count\n";
    for (const auto& c : cells) out += text::csv_line({text::join(c.members, "&"), std::to_string(c.count)}) + "\n";
    return out;
}

AssessmentReport assess_corpus(const std::vector<const KnowledgeGraph*>& corpus, const Query& q,
                               const AssessParams& params, const ingest::StopwordList& stopwords) {
    if (corpus.empty()) throw InvalidArgumentError("assessment needs at least one graph");
    AssessmentReport r;
    std::vector<EtypeRef> refs;
    for (const auto* g : corpus) {
        for (const auto& [id, e] : g->etypes()) refs.push_back({g, id});
    }
    r.graphs = focus_k(corpus, params.mu);
    r.etypes = focus_e(refs, params.eta);
    for (const auto& t : q.terms) r.query.push_back(text::join(t, " "));
    if (!q.terms.empty()) {
        auto tf = tfidf(corpus, q, stopwords);
        auto bm = bm25(corpus, q, params.bm25_m, params.bm25_b, stopwords);
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < corpus.size(); ++i) pos[corpus[i]->name()] = i;
        for (auto& s : r.graphs) {
            auto i = pos.at(s.graph);
            s.cmm = cmm(*corpus[i], q, params.alpha, params.beta, stopwords);
            s.dem = dem(*corpus[i], q, params.dem_w, stopwords);
            s.tfidf = tf[i];
            s.bm25 = bm[i];
        }
    }
    r.notes = {
        "cmm: exact and partial label matches weighted by alpha and beta, divided by the number of query terms",
        "dem: matching state read as the cardinality of each aspect (properties, superclasses, subclasses, siblings)",
        "focus: each addend min-max normalized over the ranked corpus before summation",
    };
    return r;
}

std::string write_report_json(const AssessmentReport& r) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["notes"] = r.notes;
    doc["query"] = r.query;
    doc["graphs"] = ordered_json::array();
    for (const auto& g : r.graphs) {
        ordered_json o;
        o["graph"] = g.graph;
        o["cue_k"] = g.cue_k;
        o["cue_kr"] = g.cue_kr;
        o["focus_k"] = g.focus_k;
        o["balance"] = g.balance;
        if (g.cmm) o["cmm"] = *g.cmm;
        if (g.dem) o["dem"] = *g.dem;
        if (g.tfidf) o["tfidf"] = *g.tfidf;
        if (g.bm25) o["bm25"] = *g.bm25;
        doc["graphs"].push_back(o);
    }
    doc["etypes"] = ordered_json::array();
    for (const auto& e : r.etypes) {
        ordered_json o;
        o["graph"] = e.graph;
        o["etype"] = e.etype;
        o["cue_e"] = e.cue_e;
        o["cue_er"] = e.cue_er;
        o["focus_e"] = e.focus_e;
        doc["etypes"].push_back(o);
    }
    return doc.dump(2) + "\n";
}

std::string write_report_csv(const AssessmentReport& r) {
    std::string out =
        "level,graph,etype,cue_e,cue_er,focus_e,cue_k,cue_kr,focus_k,balance,cmm,dem,tfidf,bm25\n";
    for (const auto& g : r.graphs) {
        out += text::csv_line({"graph", g.graph, "", "", "", "", text::format_double(g.cue_k),
                               text::format_double(g.cue_kr), text::format_double(g.focus_k),
                               text::format_double(g.balance), opt(g.cmm), opt(g.dem), opt(g.tfidf), opt(g.bm25)}) +
               "\n";
    }
    for (const auto& e : r.etypes) {
        out += text::csv_line({"etype", e.graph, e.etype, text::format_double(e.cue_e), text::format_double(e.cue_er),
                               text::format_double(e.focus_e), "", "", "", "", "", "", "", ""}) +
               "\n";
    }
    return out;
}

}  // namespace kgext::assess
