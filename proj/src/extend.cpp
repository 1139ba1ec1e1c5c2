#include "kgext/extend.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <json.hpp>

#include "kgext/errors.hpp"
#include "kgext/fca.hpp"
#include "kgext/matcher.hpp"
#include "kgext/text.hpp"

namespace kgext::extend {

namespace {

class Merger {
public:
    Merger(const KnowledgeGraph& ref, const KnowledgeGraph& cand, const ExtensionPlan& plan)
        : ref_(ref), cand_(cand), plan_(plan) {
        auto rec = ref.to_records();
        name_ = rec.name;
        for (auto& p : rec.properties) props_.emplace(p.id, std::move(p));
        for (auto& t : rec.types) types_.emplace(t.id, std::move(t));
        for (auto& e : rec.entities) entities_.emplace(e.id, std::move(e));
        suffix_ = "@" + (cand.name().empty() ? std::string("candidate") : cand.name());
    }

    ExtensionResult run() {
        auto pm = property_alignments();
        for (const auto& al : pm) {
            if (!prop_map_.count(al.right)) prop_map_[al.right] = al.left;
        }
        map_types();
        place_structural_entities();
        place_remaining_entities(pm);

        GraphRecords rec;
        rec.name = name_;
        for (auto& [id, p] : props_) rec.properties.push_back(p);
        for (auto& [id, t] : types_) rec.types.push_back(t);
        for (auto& [id, e] : entities_) rec.entities.push_back(e);
        ExtensionResult out{build_graph(rec), std::move(report_)};
        auto& r = out.report;
        r.reference = ref_.name();
        r.candidate = cand_.name();
        for (const auto& [id, e] : out.graph.etypes()) r.etypes_added += !ref_.has_etype(id);
        for (const auto& [id, p] : out.graph.properties()) r.properties_added += !ref_.has_property(id);
        std::sort(r.merged.begin(), r.merged.end(),
                  [](const MergeRecord& a, const MergeRecord& b) { return a.candidate_id < b.candidate_id; });
        std::sort(r.discarded.begin(), r.discarded.end(),
                  [](const DiscardRecord& a, const DiscardRecord& b) { return a.candidate_id < b.candidate_id; });
        r.entities_merged = r.merged.size();
        r.entities_discarded = r.discarded.size();
        return out;
    }

private:
    AlignedPropertyPairs property_alignments() {
        AlignedPropertyPairs pm;
        if (plan_.property_alignments) {
            pm = *plan_.property_alignments;
        } else {
            matcher::MatchParams mp;
            mp.tau = plan_.tau;
            mp.threads = plan_.threads;
            pm = matcher::match_properties(ref_, cand_, mp);
        }
        for (const auto& al : pm) {
            if (!ref_.has_property(al.left)) throw UnknownIdError("aligned property '" + al.left + "' not in reference");
            if (!cand_.has_property(al.right)) {
                throw UnknownIdError("aligned property '" + al.right + "' not in candidate");
            }
        }
        // With many-to-many input the most confident pairing wins.
        std::stable_sort(pm.begin(), pm.end(), [](const Alignment& a, const Alignment& b) {
            if (a.confidence != b.confidence) return a.confidence > b.confidence;
            return std::tie(a.left, a.right) < std::tie(b.left, b.right);
        });
        return pm;
    }

    std::string fresh_id(const std::string& base) {
        auto taken = [&](const std::string& id) {
            return types_.count(id) || entities_.count(id) || props_.count(id);
        };
        std::string id = base + suffix_;
        for (int k = 2; taken(id); ++k) id = base + suffix_ + "#" + std::to_string(k);
        return id;
    }

    // Resolves an id collision. Returns the id to use, or nullopt when the
    // caller should unify with the existing element.
    std::optional<std::string> resolve(const std::string& kind, const std::string& id, const std::string& ref_label,
                                       const std::string& cand_label) {
        if (ref_label == cand_label) return std::nullopt;
        if (plan_.conflict == ConflictPolicy::Strict) {
            throw ConflictError(kind + " id '" + id + "' exists in both graphs with labels '" + ref_label + "' and '" +
                                cand_label + "'");
        }
        auto to = fresh_id(id);
        report_.renamed.push_back({kind, id, to});
        return to;
    }

    PropertyId map_prop(const PropertyId& p) {
        auto it = prop_map_.find(p);
        if (it != prop_map_.end()) return it->second;
        const auto& label = cand_.property(p).raw_label;
        PropertyId out = p;
        auto existing = props_.find(p);
        if (existing != props_.end()) {
            if (auto renamed = resolve("property", p, existing->second.label, label)) out = *renamed;
        } else if (types_.count(p) || entities_.count(p)) {
            out = fresh_id(p);
            report_.renamed.push_back({"property", p, out});
        }
        if (!props_.count(out)) props_.emplace(out, PropertyRecord{out, label});
        prop_map_[p] = out;
        return out;
    }

    void add_props(TypeRecord& t, const std::set<PropertyId>& cand_props, const std::set<PropertyId>* already) {
        for (const auto& p : cand_props) {
            auto q = map_prop(p);
            if (already && already->count(q)) continue;
            if (std::find(t.props.begin(), t.props.end(), q) == t.props.end()) t.props.push_back(q);
        }
    }

    std::string new_etype_id(const EntityTypeId& c) {
        const auto& label = cand_.etype(c).label;
        auto it = types_.find(c);
        if (it != types_.end()) {
            auto renamed = resolve("etype", c, it->second.label, label);
            return renamed ? *renamed : c;
        }
        if (entities_.count(c) || props_.count(c)) {
            auto to = fresh_id(c);
            report_.renamed.push_back({"etype", c, to});
            return to;
        }
        return c;
    }

    void map_types() {
        std::set<EntityTypeId> used_a;
        for (const auto& al : plan_.em_ali) {
            if (!ref_.has_etype(al.left)) throw UnknownIdError("aligned entity type '" + al.left + "' not in reference");
            if (!cand_.has_etype(al.right)) {
                throw UnknownIdError("aligned entity type '" + al.right + "' not in candidate");
            }
            if (!used_a.insert(al.left).second || aligned_.count(al.right)) {
                throw InvalidArgumentError("entity type alignments must be one-to-one");
            }
            aligned_[al.right] = al.left;
        }
        for (const auto& [b, a] : aligned_) type_map_[b] = a;

        // Unaligned descendants of aligned types, reached without crossing
        // another aligned type.
        std::vector<EntityTypeId> attached;
        std::map<EntityTypeId, EntityTypeId> flatten_target;
        for (const auto& [b, a] : aligned_) {
            std::deque<EntityTypeId> queue(cand_.subclasses(b).begin(), cand_.subclasses(b).end());
            while (!queue.empty()) {
                auto c = queue.front();
                queue.pop_front();
                if (aligned_.count(c) || flatten_target.count(c) ||
                    std::find(attached.begin(), attached.end(), c) != attached.end()) {
                    continue;
                }
                if (plan_.flatten) {
                    flatten_target[c] = a;
                } else {
                    attached.push_back(c);
                }
                for (const auto& s : cand_.subclasses(c)) queue.push_back(s);
            }
        }
        std::sort(attached.begin(), attached.end());
        for (const auto& [c, a] : flatten_target) type_map_[c] = a;

        std::vector<EntityTypeId> kept;
        if (plan_.keep_unaligned_etypes) {
            for (const auto& [id, e] : cand_.etypes()) {
                if (!type_map_.count(id) && std::find(attached.begin(), attached.end(), id) == attached.end()) {
                    kept.push_back(id);
                }
            }
        }

        std::vector<EntityTypeId> created, unified;
        for (const auto* group : {&attached, &kept}) {
            for (const auto& c : *group) {
                auto id = new_etype_id(c);
                type_map_[c] = id;
                if (types_.count(id)) {
                    unified.push_back(c);
                } else {
                    types_.emplace(id, TypeRecord{id, cand_.etype(c).label, {}, {}});
                    created.push_back(c);
                }
            }
        }
        // Types of kept, unaligned branches take part in structural placement
        // only when attached below an aligned type.
        for (const auto& c : attached) structural_.insert(c);
        for (const auto& [b, a] : aligned_) structural_.insert(b);
        for (const auto& [c, a] : flatten_target) structural_.insert(c);

        for (const auto& [b, a] : aligned_) add_props(types_.at(a), cand_.prop(b), &ref_.prop(a));
        for (const auto& [c, a] : flatten_target) add_props(types_.at(a), cand_.etype(c).direct_properties, &ref_.prop(a));
        for (const auto& c : unified) {
            const auto& id = type_map_.at(c);
            add_props(types_.at(id), cand_.etype(c).direct_properties, &ref_.prop(id));
        }
        for (const auto& c : created) {
            auto& t = types_.at(type_map_.at(c));
            add_props(t, cand_.etype(c).direct_properties, nullptr);
            for (const auto& parent : cand_.etype(c).superclasses) {
                auto it = type_map_.find(parent);
                if (it == type_map_.end()) continue;
                if (std::find(t.superclasses.begin(), t.superclasses.end(), it->second) == t.superclasses.end()) {
                    t.superclasses.push_back(it->second);
                }
            }
        }
    }

    void merge_entity(const Entity& e, const EntityTypeId& etype, const std::string& via, double score) {
        EntityId id = e.id;
        auto existing = entities_.find(e.id);
        std::vector<PropertyId> props;
        for (const auto& p : e.own_properties) props.push_back(map_prop(p));
        if (existing != entities_.end() || types_.count(e.id) || props_.count(e.id)) {
            std::optional<std::string> renamed;
            if (existing != entities_.end()) {
                renamed = resolve("entity", e.id, existing->second.label, e.label);
            } else {
                renamed = fresh_id(e.id);
                report_.renamed.push_back({"entity", e.id, *renamed});
            }
            if (!renamed) {
                // Same entity in both graphs: union of properties, reference type kept.
                auto& rec = existing->second;
                for (const auto& p : props) {
                    if (std::find(rec.props.begin(), rec.props.end(), p) == rec.props.end()) rec.props.push_back(p);
                }
                if (!rec.etype) rec.etype = etype;
                report_.merged.push_back({e.id, e.id, *rec.etype, via, score});
                return;
            }
            id = *renamed;
        }
        entities_.emplace(id, EntityRecord{id, e.label, etype, props});
        report_.merged.push_back({e.id, id, etype, via, score});
    }

    void place_structural_entities() {
        for (const auto& [id, e] : cand_.entities()) {
            if (e.etype && structural_.count(*e.etype)) {
                merge_entity(e, type_map_.at(*e.etype), aligned_.count(*e.etype) ? "alignment" : "subclass", 1.0);
            } else {
                remaining_.push_back(id);
            }
        }
    }

    void place_remaining_entities(const AlignedPropertyPairs& pm) {
        if (remaining_.empty()) return;
        if (!plan_.model) {
            for (const auto& id : remaining_) report_.discarded.push_back({id, "no instance model"});
            return;
        }
        if (plan_.model->features != recognizer::FeatureKind::Instance) {
            throw LayoutMismatchError("entity placement needs an instance-kind model");
        }
        auto ctx_a = fca::formalize(ref_, fca::Scope::Schema);
        auto ctx_b = fca::formalize(cand_, fca::Scope::Instance);
        auto spec_a = propsim::SpecificityTable::build(ref_, plan_.sim_params);
        auto spec_b = propsim::SpecificityTable::build(cand_, plan_.sim_params);
        std::vector<CandidatePair> pairs;
        for (const auto& [t, et] : ref_.etypes()) {
            for (const auto& i : remaining_) pairs.push_back({t, i, PairKind::EtypeEntity});
        }
        auto kept = matcher::prune_instance(pairs, pm, ctx_a, ctx_b);
        propsim::SimInputs in{&ctx_a, &ctx_b, &spec_a, &spec_b, &pm};
        auto norm = propsim::normalize_batch(propsim::sim_raw(in, kept, plan_.threads));

        struct Best {
            EntityTypeId etype;
            double score = -1;
        };
        std::map<EntityId, Best> best;
        for (const auto& row : norm) {
            recognizer::FeatureVector fv{recognizer::FeatureKind::Instance, {row.sim_h, row.sim_v, row.sim_i}};
            auto pr = recognizer::predict(*plan_.model, fv, plan_.cutoff);
            if (pr.label != 1) continue;
            auto& b = best[row.right];
            if (pr.score > b.score || (pr.score == b.score && row.left < b.etype)) b = {row.left, pr.score};
        }
        std::set<EntityId> candidates_seen;
        for (const auto& p : kept) candidates_seen.insert(p.right);
        for (const auto& id : remaining_) {
            auto it = best.find(id);
            if (it != best.end()) {
                merge_entity(cand_.entity(id), it->second.etype, "recognition", it->second.score);
            } else if (!candidates_seen.count(id)) {
                report_.discarded.push_back({id, "no aligned property shared with any reference type"});
            } else {
                report_.discarded.push_back({id, "rejected by recognizer"});
            }
        }
    }

    const KnowledgeGraph& ref_;
    const KnowledgeGraph& cand_;
    const ExtensionPlan& plan_;
    std::string name_;
    std::string suffix_;
    std::map<PropertyId, PropertyRecord> props_;
    std::map<EntityTypeId, TypeRecord> types_;
    std::map<EntityId, EntityRecord> entities_;
    std::map<PropertyId, PropertyId> prop_map_;
    std::map<EntityTypeId, EntityTypeId> aligned_;   // candidate -> reference
    std::map<EntityTypeId, EntityTypeId> type_map_;  // candidate -> extended
    std::set<EntityTypeId> structural_;
    std::vector<EntityId> remaining_;
    ExtensionReport report_;
};

}  // namespace

ConflictPolicy parse_conflict_policy(std::string_view s) {
    if (s == "rename") return ConflictPolicy::Rename;
    if (s == "strict") return ConflictPolicy::Strict;
    throw InvalidArgumentError("unknown conflict policy '" + std::string(s) + "' (expected rename|strict)");
}

ExtensionResult extend(const KnowledgeGraph& ref, const KnowledgeGraph& cand, const ExtensionPlan& plan) {
    return Merger(ref, cand, plan).run();
}

std::vector<ComparisonRow> compare_assessment(const KnowledgeGraph& ref, const KnowledgeGraph& ext,
                                              const std::vector<EntityTypeId>& aligned_etypes,
                                              const std::map<EntityTypeId, std::string>& queries,
                                              const assess::AssessParams& params) {
    std::vector<assess::EtypeRef> corpus;
    for (const auto& [id, e] : ref.etypes()) corpus.push_back({&ref, id});
    const std::size_t offset = corpus.size();
    for (const auto& [id, e] : ext.etypes()) corpus.push_back({&ext, id});
    auto cues = assess::cue_records(corpus, params.eta);
    auto cue_of = [&](const KnowledgeGraph& g, const EntityTypeId& e) -> const assess::CueRecord& {
        std::size_t base = &g == &ref ? 0 : offset;
        std::size_t end = &g == &ref ? offset : corpus.size();
        for (std::size_t i = base; i < end; ++i) {
            if (corpus[i].etype == e) return cues[i];
        }
        throw UnknownIdError("entity type '" + e + "' missing from graph '" + g.name() + "'");
    };

    std::vector<ComparisonRow> rows;
    for (const auto& e : aligned_etypes) {
        ComparisonRow r;
        r.etype = e;
        auto qit = queries.find(e);
        r.query = qit != queries.end() ? qit->second : ref.etype(e).label;
        auto q = assess::parse_query(r.query);
        r.cmm_before = assess::cmm(ref, q, params.alpha, params.beta);
        r.cmm_after = assess::cmm(ext, q, params.alpha, params.beta);
        r.dem_before = assess::dem(ref, q, params.dem_w);
        r.dem_after = assess::dem(ext, q, params.dem_w);
        const auto& before = cue_of(ref, e);
        const auto& after = cue_of(ext, e);
        r.cue_e_before = before.cue_e;
        r.cue_e_after = after.cue_e;
        r.cue_er_before = before.cue_er;
        r.cue_er_after = after.cue_er;
        r.focus_before = before.focus_e;
        r.focus_after = after.focus_e;
        rows.push_back(std::move(r));
    }
    auto normalize = [&](double ComparisonRow::*b, double ComparisonRow::*a, double ComparisonRow::*nb,
                         double ComparisonRow::*na) {
        std::vector<double> xs;
        for (const auto& r : rows) {
            xs.push_back(r.*b);
            xs.push_back(r.*a);
        }
        auto n = assess::minmax(xs);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].*nb = n[2 * i];
            rows[i].*na = n[2 * i + 1];
        }
    };
    normalize(&ComparisonRow::cmm_before, &ComparisonRow::cmm_after, &ComparisonRow::cmm_before_norm,
              &ComparisonRow::cmm_after_norm);
    normalize(&ComparisonRow::dem_before, &ComparisonRow::dem_after, &ComparisonRow::dem_before_norm,
              &ComparisonRow::dem_after_norm);
    normalize(&ComparisonRow::focus_before, &ComparisonRow::focus_after, &ComparisonRow::focus_before_norm,
              &ComparisonRow::focus_after_norm);
    return rows;
}

std::string write_report_json(const ExtensionReport& r) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["reference"] = r.reference;
    doc["candidate"] = r.candidate;
    doc["counts"] = {{"etypes_added", r.etypes_added},
                     {"properties_added", r.properties_added},
                     {"entities_merged", r.entities_merged},
                     {"entities_discarded", r.entities_discarded}};
    doc["merged"] = ordered_json::array();
    for (const auto& m : r.merged) {
        doc["merged"].push_back(ordered_json{{"candidate_id", m.candidate_id},
                                             {"ext_id", m.ext_id},
                                             {"etype", m.etype},
                                             {"via", m.via},
                                             {"score", m.score}});
    }
    doc["discarded"] = ordered_json::array();
    for (const auto& d : r.discarded) {
        doc["discarded"].push_back(ordered_json{{"candidate_id", d.candidate_id}, {"reason", d.reason}});
    }
    doc["renamed"] = ordered_json::array();
    for (const auto& x : r.renamed) {
        doc["renamed"].push_back(ordered_json{{"kind", x.kind}, {"from", x.from}, {"to", x.to}});
    }
    doc["comparison"] = ordered_json::array();
    for (const auto& c : r.comparison) {
        doc["comparison"].push_back(ordered_json{{"etype", c.etype},
                                                 {"query", c.query},
                                                 {"cmm_before", c.cmm_before},
                                                 {"cmm_after", c.cmm_after},
                                                 {"dem_before", c.dem_before},
                                                 {"dem_after", c.dem_after},
                                                 {"cue_e_before", c.cue_e_before},
                                                 {"cue_e_after", c.cue_e_after},
                                                 {"cue_er_before", c.cue_er_before},
                                                 {"cue_er_after", c.cue_er_after},
                                                 {"focus_before", c.focus_before},
                                                 {"focus_after", c.focus_after},
                                                 {"cmm_before_norm", c.cmm_before_norm},
                                                 {"cmm_after_norm", c.cmm_after_norm},
                                                 {"dem_before_norm", c.dem_before_norm},
                                                 {"dem_after_norm", c.dem_after_norm},
                                                 {"focus_before_norm", c.focus_before_norm},
                                                 {"focus_after_norm", c.focus_after_norm}});
    }
    return doc.dump(2) + "\n";
}

std::string write_report_csv(const ExtensionReport& r) {
    std::string out =
        "etype,query,cmm_before,cmm_after,dem_before,dem_after,cue_e_before,cue_e_after,cue_er_before,cue_er_after,"
        "focus_before,focus_after,cmm_before_norm,cmm_after_norm,dem_before_norm,dem_after_norm,focus_before_norm,"
        "focus_after_norm\n";
    auto f = [](double v) { return text::format_double(v); };
    for (const auto& c : r.comparison) {
        out += text::csv_line({c.etype, c.query, f(c.cmm_before), f(c.cmm_after), f(c.dem_before), f(c.dem_after),
                               f(c.cue_e_before), f(c.cue_e_after), f(c.cue_er_before), f(c.cue_er_after),
                               f(c.focus_before), f(c.focus_after), f(c.cmm_before_norm), f(c.cmm_after_norm),
                               f(c.dem_before_norm), f(c.dem_after_norm), f(c.focus_before_norm),
                               f(c.focus_after_norm)}) +
               "\n";
    }
    return out;
}

}  // namespace kgext::extend
