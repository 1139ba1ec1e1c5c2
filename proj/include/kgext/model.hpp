#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgext/labels.hpp"

namespace kgext {

using PropertyId = std::string;
using EntityTypeId = std::string;
using EntityId = std::string;

struct Property {
    PropertyId id;
    std::string raw_label;
    std::vector<std::string> normalized_label;
};

struct EntityType {
    EntityTypeId id;
    std::string label;
    std::set<PropertyId> direct_properties;
    std::set<EntityTypeId> superclasses;
    int layer = 1;
};

struct Entity {
    EntityId id;
    std::string label;
    std::optional<EntityTypeId> etype;
    std::set<PropertyId> own_properties;
};

// Build input. Empty labels default to the local name of the id.
struct PropertyRecord {
    PropertyId id;
    std::string label;
};

struct TypeRecord {
    EntityTypeId id;
    std::string label;
    std::vector<PropertyId> props;
    std::vector<EntityTypeId> superclasses;
};

struct EntityRecord {
    EntityId id;
    std::string label;
    std::optional<EntityTypeId> etype;
    std::vector<PropertyId> props;
};

struct SubclassRecord {
    EntityTypeId child;
    EntityTypeId parent;
};

struct GraphRecords {
    std::string name;
    std::vector<PropertyRecord> properties;
    std::vector<TypeRecord> types;
    std::vector<EntityRecord> entities;
    std::vector<SubclassRecord> subclasses;
};

/// Schema- and instance-level knowledge graph. Immutable once built; all
/// hierarchy queries are precomputed so a graph can be shared across threads.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    const std::string& name() const { return name_; }
    const std::map<PropertyId, Property>& properties() const { return properties_; }
    const std::map<EntityTypeId, EntityType>& etypes() const { return etypes_; }
    const std::map<EntityId, Entity>& entities() const { return entities_; }

    bool has_property(const PropertyId& id) const { return properties_.count(id) > 0; }
    bool has_etype(const EntityTypeId& id) const { return etypes_.count(id) > 0; }
    bool has_entity(const EntityId& id) const { return entities_.count(id) > 0; }

    const Property& property(const PropertyId& id) const;
    const EntityType& etype(const EntityTypeId& id) const;
    const Entity& entity(const EntityId& id) const;

    /// Cumulative properties: direct ones plus everything inherited.
    const std::set<PropertyId>& prop(const EntityTypeId& e) const;
    /// The entity's own properties (inherited ones are not added).
    const std::set<PropertyId>& ent_prop(const EntityId& i) const;
    /// Entity types whose cumulative property set contains p.
    const std::set<EntityTypeId>& k_v(const PropertyId& p) const;

    const std::set<EntityTypeId>& subclasses(const EntityTypeId& e) const;
    const std::set<EntityTypeId>& descendants(const EntityTypeId& e) const;
    /// Union of prop(D) over every (transitive) descendant D of e.
    const std::set<PropertyId>& descendant_props(const EntityTypeId& e) const;
    /// Direct instances of e, sorted by id.
    const std::vector<EntityId>& instances(const EntityTypeId& e) const;

    int max_depth() const { return max_depth_; }

    /// Rebuild input that reproduces this graph.
    GraphRecords to_records() const;

private:
    friend KnowledgeGraph build_graph(const GraphRecords&, const ingest::StopwordList&);

    std::string name_;
    std::map<PropertyId, Property> properties_;
    std::map<EntityTypeId, EntityType> etypes_;
    std::map<EntityId, Entity> entities_;

    std::map<EntityTypeId, std::set<PropertyId>> cumulative_;
    std::map<PropertyId, std::set<EntityTypeId>> kv_;
    std::map<EntityTypeId, std::set<EntityTypeId>> children_;
    std::map<EntityTypeId, std::set<EntityTypeId>> descendants_;
    std::map<EntityTypeId, std::set<PropertyId>> descendant_props_;
    std::map<EntityTypeId, std::vector<EntityId>> instances_;
    int max_depth_ = 0;
};

/// Validates the records and computes layers with a topological pass.
/// Throws CycleError, DanglingRefError or DuplicateIdError.
KnowledgeGraph build_graph(const GraphRecords& records,
                           const ingest::StopwordList& stopwords = ingest::StopwordList::builtin());

KnowledgeGraph build_graph(const std::string& name, const std::vector<TypeRecord>& types,
                           const std::vector<EntityRecord>& entities,
                           const std::vector<SubclassRecord>& subclasses);

}  // namespace kgext
