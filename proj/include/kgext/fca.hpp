#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kgext/model.hpp"

namespace kgext::fca {

enum class ConceptKind { EntityType, Entity };

struct ConceptRef {
    ConceptKind kind;
    std::string id;

    friend bool operator==(const ConceptRef&, const ConceptRef&) = default;
    friend auto operator<=>(const ConceptRef&, const ConceptRef&) = default;
};

enum class Scope { Schema, Instance, Both };

Scope parse_scope(std::string_view s);

/// Three-valued formal context: +1 associated, 0 undefined, -1 unassociated.
class FormalContext {
public:
    FormalContext() = default;
    FormalContext(std::string source, std::vector<ConceptRef> concepts, std::vector<PropertyId> properties);

    const std::string& source() const { return source_; }
    const std::vector<ConceptRef>& concepts() const { return concepts_; }
    const std::vector<PropertyId>& properties() const { return properties_; }

    std::int8_t cell(std::size_t row, std::size_t col) const { return cells_[row * properties_.size() + col]; }
    void set_cell(std::size_t row, std::size_t col, std::int8_t v);

    /// Cell by ids; throws UnknownIdError when either is absent.
    std::int8_t cell(const ConceptRef& c, const PropertyId& p) const;
    std::size_t row_of(const ConceptRef& c) const;
    std::size_t col_of(const PropertyId& p) const;
    bool has_concept(const ConceptRef& c) const { return row_index_.count(c) > 0; }
    bool has_property(const PropertyId& p) const { return col_index_.count(p) > 0; }

    /// Number of +1 cells in the row, i.e. |prop(E)| or |t(I)|.
    std::size_t associated_count(std::size_t row) const;

    friend bool operator==(const FormalContext& a, const FormalContext& b) {
        return a.concepts_ == b.concepts_ && a.properties_ == b.properties_ && a.cells_ == b.cells_;
    }

private:
    std::string source_;
    std::vector<ConceptRef> concepts_;
    std::vector<PropertyId> properties_;
    std::vector<std::int8_t> cells_;
    std::map<ConceptRef, std::size_t> row_index_;
    std::map<PropertyId, std::size_t> col_index_;
};

/// Entity-type rows: +1 if p in prop(E), 0 if p only appears on a descendant,
/// -1 otherwise. Entity rows: +1 if p in t(I), 0 if p is inherited from the
/// entity's type but missing on the entity, -1 otherwise. Rows follow the
/// graph's sorted id order (entity types first); columns are sorted property ids.
FormalContext formalize(const KnowledgeGraph& g, Scope scope = Scope::Both);

/// CSV: header `kind,concept,<property ids...>`, then one row per concept with
/// kind `etype` or `entity` and cells in {1,0,-1}.
std::string export_context(const FormalContext& f);
FormalContext import_context(std::string_view csv, const std::string& source = "");

}  // namespace kgext::fca
