#include "kgext/propsim.hpp"

#include <algorithm>
#include <cmath>

#include "kgext/errors.hpp"
#include "kgext/parallel.hpp"
#include "kgext/text.hpp"

namespace kgext::propsim {

namespace {

std::vector<double> frequencies(const KnowledgeGraph& g, const std::set<EntityTypeId>& types, EntropyMode mode) {
    std::vector<double> f;
    f.reserve(types.size());
    for (const auto& e : types) {
        f.push_back(mode == EntropyMode::Schema ? 1.0 : static_cast<double>(g.instances(e).size()));
    }
    return f;
}

double total(const std::vector<double>& f) {
    double s = 0;
    for (double x : f) s += x;
    return s;
}

fca::ConceptRef right_ref(const CandidatePair& pair) {
    return {pair.kind == PairKind::EtypeEtype ? fca::ConceptKind::EntityType : fca::ConceptKind::Entity, pair.right};
}

double spec_value(const SpecificityTable::Row& r, SimKind k) {
    return k == SimKind::H ? r.hs : k == SimKind::V ? r.vs : r.is;
}

}  // namespace

EntropyMode parse_entropy_mode(std::string_view s) {
    if (s == "schema") return EntropyMode::Schema;
    if (s == "instance") return EntropyMode::Instance;
    throw InvalidArgumentError("unknown entropy mode '" + std::string(s) + "' (expected schema|instance)");
}

double hs(const KnowledgeGraph& g, const PropertyId& p, double lambda) {
    auto n = std::max<std::size_t>(g.k_v(p).size(), 1);
    return std::exp(lambda * (1.0 - static_cast<double>(n)));
}

double vs(const KnowledgeGraph& g, const PropertyId& p, std::optional<double> theta) {
    const auto& kv = g.k_v(p);
    double t = theta ? *theta : (g.max_depth() > 0 ? 1.0 / g.max_depth() : 1.0);
    int layer = 1;
    if (!kv.empty()) {
        layer = g.etype(*kv.begin()).layer;
        for (const auto& e : kv) layer = std::min(layer, g.etype(e).layer);
    }
    return t * layer;
}

double entropy_of(const std::vector<double>& freqs) {
    double n = total(freqs);
    if (n <= 0) return 0.0;
    double acc = 0;
    for (double f : freqs) {
        if (f > 0) acc -= f * std::log(f / n);
    }
    return acc / n;
}

double entropy(const KnowledgeGraph& g, EntropyMode mode) {
    std::set<EntityTypeId> all;
    for (const auto& [id, e] : g.etypes()) all.insert(id);
    return entropy_of(frequencies(g, all, mode));
}

double is_(const KnowledgeGraph& g, const PropertyId& p, EntropyMode mode) {
    const auto& kv = g.k_v(p);
    std::set<EntityTypeId> rest;
    for (const auto& [id, e] : g.etypes()) {
        if (!kv.count(id)) rest.insert(id);
    }
    auto fv = frequencies(g, kv, mode);
    auto fr = frequencies(g, rest, mode);
    double nv = total(fv), nr = total(fr), n = nv + nr;
    if (n <= 0 || nv <= 0 || nr <= 0) return 0.0;
    std::vector<double> all = fv;
    all.insert(all.end(), fr.begin(), fr.end());
    double gain = entropy_of(all) - (nv / n) * entropy_of(fv) - (nr / n) * entropy_of(fr);
    // Information gain is non-negative; clip rounding noise.
    return std::max(gain, 0.0);
}

SpecificityTable SpecificityTable::build(const KnowledgeGraph& g, const Params& params) {
    SpecificityTable t;
    t.graph_ = g.name();
    t.lambda_ = params.lambda;
    t.max_depth_ = g.max_depth();
    t.theta_ = params.theta ? *params.theta : (g.max_depth() > 0 ? 1.0 / g.max_depth() : 1.0);
    t.entropy_ = entropy(g, params.entropy);
    for (const auto& [id, p] : g.properties()) {
        t.rows_[id] = {hs(g, id, t.lambda_), vs(g, id, t.theta_), is_(g, id, params.entropy)};
    }
    return t;
}

const SpecificityTable::Row& SpecificityTable::row(const PropertyId& p) const {
    auto it = rows_.find(p);
    if (it == rows_.end()) throw UnknownIdError("property '" + p + "' has no specificity in graph '" + graph_ + "'");
    return it->second;
}

double sim_pair(const SimInputs& in, const CandidatePair& pair, SimKind kind) {
    const auto& fa = *in.ctx_a;
    const auto& fb = *in.ctx_b;
    auto ra = fa.row_of({fca::ConceptKind::EntityType, pair.left});
    auto rb = fb.row_of(right_ref(pair));
    auto na = fa.associated_count(ra);
    auto nb = fb.associated_count(rb);
    if (na == 0 || nb == 0) return 0.0;
    std::vector<double> terms;
    for (const auto& al : *in.pm) {
        if (!fa.has_property(al.left) || !fb.has_property(al.right)) continue;
        if (fa.cell(ra, fa.col_of(al.left)) != 1 || fb.cell(rb, fb.col_of(al.right)) != 1) continue;
        double sa = spec_value(in.spec_a->row(al.left), kind);
        double sb = spec_value(in.spec_b->row(al.right), kind);
        terms.push_back(sa / static_cast<double>(na) + sb / static_cast<double>(nb));
    }
    // Summing in sorted order makes the result independent of pm order.
    std::sort(terms.begin(), terms.end());
    double s = 0;
    for (double x : terms) s += x;
    return 0.5 * s;
}

RawSimTriple sim_triple(const SimInputs& in, const CandidatePair& pair) {
    return {pair.left, pair.right, sim_pair(in, pair, SimKind::H), sim_pair(in, pair, SimKind::V),
            sim_pair(in, pair, SimKind::I)};
}

std::vector<RawSimTriple> sim_raw(const SimInputs& in, const std::vector<CandidatePair>& pairs, unsigned threads) {
    std::vector<RawSimTriple> out(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) { out[i] = sim_triple(in, pairs[i]); });
    return out;
}

std::vector<double> sim_raw(const SimInputs& in, const std::vector<CandidatePair>& pairs, SimKind kind) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(sim_pair(in, p, kind));
    return out;
}

std::vector<double> normalize_values(const std::vector<double>& xs, BatchStats* stats) {
    BatchStats st;
    std::vector<double> out(xs.size(), 0.5);
    if (xs.empty()) {
        if (stats) *stats = st;
        return out;
    }
    for (double x : xs) {
        if (!std::isfinite(x)) throw NonFiniteError("non-finite similarity value in batch");
        st.mean += x;
    }
    st.mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - st.mean) * (x - st.mean);
    st.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    if (st.stddev > 0) {
        std::vector<double> z(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - st.mean) / st.stddev;
        auto [lo, hi] = std::minmax_element(z.begin(), z.end());
        st.zmin = *lo;
        st.zmax = *hi;
        if (st.zmax > st.zmin) {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out[i] = std::clamp((z[i] - st.zmin) / (st.zmax - st.zmin), 0.0, 1.0);
            }
        }
    }
    if (stats) *stats = st;
    return out;
}

std::vector<NormalizedSimTriple> normalize_batch(const std::vector<RawSimTriple>& raw) {
    std::vector<double> h, v, i;
    for (const auto& r : raw) {
        h.push_back(r.sim_h);
        v.push_back(r.sim_v);
        i.push_back(r.sim_i);
    }
    auto nh = normalize_values(h), nv = normalize_values(v), ni = normalize_values(i);
    std::vector<NormalizedSimTriple> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) out[k] = {raw[k].left, raw[k].right, nh[k], nv[k], ni[k]};
    return out;
}

SimTable::SimTable(std::vector<RawSimTriple> rows, bool normalized)
    : rows_(std::move(rows)), normalized_(normalized) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!index_.emplace(std::make_pair(rows_[i].left, rows_[i].right), i).second) {
            throw DuplicateIdError("pair (" + rows_[i].left + ", " + rows_[i].right + ") appears twice in simtable");
        }
    }
}

const RawSimTriple& SimTable::at(const std::string& left, const std::string& right) const {
    auto it = index_.find({left, right});
    if (it == index_.end()) throw MissingSimError("no similarity row for pair (" + left + ", " + right + ")");
    return rows_[it->second];
}

bool SimTable::contains(const std::string& left, const std::string& right) const {
    return index_.count({left, right}) > 0;
}

std::string write_simtable_csv(const SimTable& t) {
    std::string out = std::string("# kgext simtable variant=") + (t.normalized() ? "normalized" : "raw") + "\n";
    out += "left_id,right_id,sim_h,sim_v,sim_i\n";
    for (const auto& r : t.rows()) {
        out += text::csv_line({r.left, r.right, text::format_double(r.sim_h), text::format_double(r.sim_v),
                               text::format_double(r.sim_i)}) +
               "\n";
    }
    return out;
}

SimTable parse_simtable_csv(std::string_view contents) {
    auto ls = text::lines(contents);
    std::size_t i = 0;
    bool normalized = false;
    if (i < ls.size() && !ls[i].empty() && ls[i][0] == '#') {
        if (ls[i].find("variant=normalized") != std::string::npos) {
            normalized = true;
        } else if (ls[i].find("variant=raw") == std::string::npos) {
            throw FormatError("simtable comment must declare variant=raw or variant=normalized");
        }
        ++i;
    }
    if (i >= ls.size() || ls[i] != "left_id,right_id,sim_h,sim_v,sim_i") {
        throw FormatError("simtable header must be 'left_id,right_id,sim_h,sim_v,sim_i'");
    }
    std::vector<RawSimTriple> rows;
    for (++i; i < ls.size(); ++i) {
        if (ls[i].empty()) continue;
        auto f = text::csv_parse_line(ls[i]);
        if (f.size() != 5) throw FormatError("simtable line " + std::to_string(i + 1) + ": expected 5 fields");
        rows.push_back({f[0], f[1], text::parse_double(f[2]), text::parse_double(f[3]), text::parse_double(f[4])});
    }
    return SimTable(std::move(rows), normalized);
}

}  // namespace kgext::propsim
