#include "kgext/model.hpp"

#include <deque>

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext {

namespace {

const std::set<std::string> kEmptySet;
const std::vector<std::string> kEmptyVec;

template <typename Map>
const auto& lookup(const Map& m, const std::string& id, const char* what) {
    auto it = m.find(id);
    if (it == m.end()) throw UnknownIdError(std::string("unknown ") + what + " '" + id + "'");
    return it->second;
}

std::string label_or_local(const std::string& label, const std::string& id) {
    return label.empty() ? text::local_name(id) : label;
}

}  // namespace

const Property& KnowledgeGraph::property(const PropertyId& id) const {
    return lookup(properties_, id, "property");
}

const EntityType& KnowledgeGraph::etype(const EntityTypeId& id) const {
    return lookup(etypes_, id, "entity type");
}

const Entity& KnowledgeGraph::entity(const EntityId& id) const {
    return lookup(entities_, id, "entity");
}

const std::set<PropertyId>& KnowledgeGraph::prop(const EntityTypeId& e) const {
    return lookup(cumulative_, e, "entity type");
}

const std::set<PropertyId>& KnowledgeGraph::ent_prop(const EntityId& i) const {
    return entity(i).own_properties;
}

const std::set<EntityTypeId>& KnowledgeGraph::k_v(const PropertyId& p) const {
    return lookup(kv_, p, "property");
}

const std::set<EntityTypeId>& KnowledgeGraph::subclasses(const EntityTypeId& e) const {
    return lookup(children_, e, "entity type");
}

const std::set<EntityTypeId>& KnowledgeGraph::descendants(const EntityTypeId& e) const {
    return lookup(descendants_, e, "entity type");
}

const std::set<PropertyId>& KnowledgeGraph::descendant_props(const EntityTypeId& e) const {
    return lookup(descendant_props_, e, "entity type");
}

const std::vector<EntityId>& KnowledgeGraph::instances(const EntityTypeId& e) const {
    etype(e);
    auto it = instances_.find(e);
    return it == instances_.end() ? kEmptyVec : it->second;
}

GraphRecords KnowledgeGraph::to_records() const {
    GraphRecords r;
    r.name = name_;
    for (const auto& [id, p] : properties_) r.properties.push_back({id, p.raw_label});
    for (const auto& [id, e] : etypes_) {
        r.types.push_back({id, e.label, {e.direct_properties.begin(), e.direct_properties.end()},
                           {e.superclasses.begin(), e.superclasses.end()}});
    }
    for (const auto& [id, i] : entities_) {
        r.entities.push_back({id, i.label, i.etype, {i.own_properties.begin(), i.own_properties.end()}});
    }
    return r;
}

KnowledgeGraph build_graph(const GraphRecords& records, const ingest::StopwordList& stopwords) {
    KnowledgeGraph g;
    g.name_ = records.name;

    auto declare_property = [&](const PropertyId& id, const std::string& label) {
        if (id.empty()) throw DanglingRefError("empty property id");
        auto [it, inserted] = g.properties_.try_emplace(id);
        if (inserted) {
            it->second.id = id;
            it->second.raw_label = label_or_local(label, id);
        }
    };

    for (const auto& pr : records.properties) {
        if (g.properties_.count(pr.id)) throw DuplicateIdError("property '" + pr.id + "' declared twice");
        declare_property(pr.id, pr.label);
    }

    for (const auto& tr : records.types) {
        if (tr.id.empty()) throw DanglingRefError("empty entity type id");
        if (g.etypes_.count(tr.id)) throw DuplicateIdError("entity type '" + tr.id + "' declared twice");
        EntityType e;
        e.id = tr.id;
        e.label = label_or_local(tr.label, tr.id);
        for (const auto& p : tr.props) {
            declare_property(p, "");
            e.direct_properties.insert(p);
        }
        g.etypes_.emplace(tr.id, std::move(e));
    }

    for (const auto& er : records.entities) {
        if (er.id.empty()) throw DanglingRefError("empty entity id");
        if (g.entities_.count(er.id)) throw DuplicateIdError("entity '" + er.id + "' declared twice");
        if (g.etypes_.count(er.id)) {
            throw DuplicateIdError("id '" + er.id + "' used for both an entity type and an entity");
        }
        Entity i;
        i.id = er.id;
        i.label = label_or_local(er.label, er.id);
        i.etype = er.etype;
        for (const auto& p : er.props) {
            declare_property(p, "");
            i.own_properties.insert(p);
        }
        g.entities_.emplace(er.id, std::move(i));
    }

    // Superclass edges come from both the type records and the subclass list.
    auto add_edge = [&](const EntityTypeId& child, const EntityTypeId& parent) {
        auto c = g.etypes_.find(child);
        if (c == g.etypes_.end()) throw DanglingRefError("subclass record names unknown type '" + child + "'");
        if (!g.etypes_.count(parent)) {
            throw DanglingRefError("type '" + child + "' has unknown superclass '" + parent + "'");
        }
        c->second.superclasses.insert(parent);
    };
    for (const auto& tr : records.types) {
        for (const auto& parent : tr.superclasses) add_edge(tr.id, parent);
    }
    for (const auto& sr : records.subclasses) add_edge(sr.child, sr.parent);

    for (const auto& [id, i] : g.entities_) {
        if (i.etype && !g.etypes_.count(*i.etype)) {
            throw DanglingRefError("entity '" + id + "' has unknown type '" + *i.etype + "'");
        }
    }

    for (auto& [id, p] : g.properties_) {
        p.normalized_label = ingest::normalize_label(p.raw_label, stopwords);
        g.kv_[id];
    }

    // Kahn's algorithm from the roots down; anything left unvisited is on a cycle.
    std::map<EntityTypeId, std::size_t> pending;
    for (const auto& [id, e] : g.etypes_) {
        g.children_[id];
        pending[id] = e.superclasses.size();
        for (const auto& parent : e.superclasses) g.children_[parent].insert(id);
    }
    std::deque<EntityTypeId> queue;
    for (const auto& [id, n] : pending) {
        if (n == 0) queue.push_back(id);
    }
    std::vector<EntityTypeId> order;
    while (!queue.empty()) {
        auto id = queue.front();
        queue.pop_front();
        order.push_back(id);
        for (const auto& child : g.children_[id]) {
            if (--pending[child] == 0) queue.push_back(child);
        }
    }
    if (order.size() != g.etypes_.size()) {
        for (const auto& [id, n] : pending) {
            if (n > 0) throw CycleError("subclass cycle through entity type '" + id + "'");
        }
    }

    g.max_depth_ = g.etypes_.empty() ? 0 : 1;
    for (const auto& id : order) {
        auto& e = g.etypes_.at(id);
        auto& cum = g.cumulative_[id];
        cum = e.direct_properties;
        int layer = 0;
        for (const auto& parent : e.superclasses) {
            const auto& pe = g.etypes_.at(parent);
            layer = layer == 0 ? pe.layer : std::min(layer, pe.layer);
            const auto& pc = g.cumulative_.at(parent);
            cum.insert(pc.begin(), pc.end());
        }
        e.layer = layer + 1;
        g.max_depth_ = std::max(g.max_depth_, e.layer);
        for (const auto& p : cum) g.kv_[p].insert(id);
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto& desc = g.descendants_[*it];
        auto& dprops = g.descendant_props_[*it];
        for (const auto& child : g.children_.at(*it)) {
            desc.insert(child);
            const auto& cd = g.descendants_.at(child);
            desc.insert(cd.begin(), cd.end());
            const auto& cp = g.cumulative_.at(child);
            dprops.insert(cp.begin(), cp.end());
            const auto& cdp = g.descendant_props_.at(child);
            dprops.insert(cdp.begin(), cdp.end());
        }
    }

    for (const auto& [id, i] : g.entities_) {
        if (i.etype) g.instances_[*i.etype].push_back(id);
    }
    return g;
}

KnowledgeGraph build_graph(const std::string& name, const std::vector<TypeRecord>& types,
                           const std::vector<EntityRecord>& entities,
                           const std::vector<SubclassRecord>& subclasses) {
    GraphRecords r;
    r.name = name;
    r.types = types;
    r.entities = entities;
    r.subclasses = subclasses;
    return build_graph(r);
}

}  // namespace kgext
