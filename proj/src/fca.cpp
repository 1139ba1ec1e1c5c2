#include "kgext/fca.hpp"

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext::fca {

Scope parse_scope(std::string_view s) {
    if (s == "schema") return Scope::Schema;
    if (s == "instance") return Scope::Instance;
    if (s == "both") return Scope::Both;
    throw InvalidArgumentError("unknown scope '" + std::string(s) + "' (expected schema|instance|both)");
}

FormalContext::FormalContext(std::string source, std::vector<ConceptRef> concepts,
                             std::vector<PropertyId> properties)
    : source_(std::move(source)), concepts_(std::move(concepts)), properties_(std::move(properties)),
      cells_(concepts_.size() * properties_.size(), -1) {
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        if (!row_index_.emplace(concepts_[i], i).second) {
            throw DuplicateIdError("concept '" + concepts_[i].id + "' appears twice in context");
        }
    }
    for (std::size_t j = 0; j < properties_.size(); ++j) {
        if (!col_index_.emplace(properties_[j], j).second) {
            throw DuplicateIdError("property '" + properties_[j] + "' appears twice in context");
        }
    }
}

void FormalContext::set_cell(std::size_t row, std::size_t col, std::int8_t v) {
    if (v < -1 || v > 1) throw InvalidArgumentError("context cells must be in {-1,0,1}");
    cells_[row * properties_.size() + col] = v;
}

std::size_t FormalContext::row_of(const ConceptRef& c) const {
    auto it = row_index_.find(c);
    if (it == row_index_.end()) throw UnknownIdError("concept '" + c.id + "' not in context");
    return it->second;
}

std::size_t FormalContext::col_of(const PropertyId& p) const {
    auto it = col_index_.find(p);
    if (it == col_index_.end()) throw UnknownIdError("property '" + p + "' not in context");
    return it->second;
}

std::int8_t FormalContext::cell(const ConceptRef& c, const PropertyId& p) const {
    return cell(row_of(c), col_of(p));
}

std::size_t FormalContext::associated_count(std::size_t row) const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < properties_.size(); ++j) n += cell(row, j) == 1;
    return n;
}

FormalContext formalize(const KnowledgeGraph& g, Scope scope) {
    std::vector<ConceptRef> concepts;
    if (scope != Scope::Instance) {
        for (const auto& [id, e] : g.etypes()) concepts.push_back({ConceptKind::EntityType, id});
    }
    if (scope != Scope::Schema) {
        for (const auto& [id, i] : g.entities()) concepts.push_back({ConceptKind::Entity, id});
    }
    std::vector<PropertyId> props;
    for (const auto& [id, p] : g.properties()) props.push_back(id);

    FormalContext f(g.name(), concepts, props);
    for (std::size_t r = 0; r < concepts.size(); ++r) {
        const auto& c = concepts[r];
        const std::set<PropertyId>* associated = nullptr;
        const std::set<PropertyId>* undefined = nullptr;
        if (c.kind == ConceptKind::EntityType) {
            associated = &g.prop(c.id);
            undefined = &g.descendant_props(c.id);
        } else {
            const auto& ent = g.entity(c.id);
            associated = &ent.own_properties;
            if (ent.etype) undefined = &g.prop(*ent.etype);
        }
        for (std::size_t col = 0; col < props.size(); ++col) {
            const auto& p = props[col];
            std::int8_t v = -1;
            if (associated->count(p)) {
                v = 1;
            } else if (undefined && undefined->count(p)) {
                v = 0;
            }
            f.set_cell(r, col, v);
        }
    }
    return f;
}

std::string export_context(const FormalContext& f) {
    std::vector<std::string> header{"kind", "concept"};
    header.insert(header.end(), f.properties().begin(), f.properties().end());
    std::string out = text::csv_line(header) + "\n";
    for (std::size_t r = 0; r < f.concepts().size(); ++r) {
        const auto& c = f.concepts()[r];
        std::vector<std::string> row{c.kind == ConceptKind::EntityType ? "etype" : "entity", c.id};
        for (std::size_t col = 0; col < f.properties().size(); ++col) row.push_back(std::to_string(f.cell(r, col)));
        out += text::csv_line(row) + "\n";
    }
    return out;
}

FormalContext import_context(std::string_view csv, const std::string& source) {
    auto ls = text::lines(csv);
    if (ls.empty()) throw FormatError("context CSV is empty");
    auto header = text::csv_parse_line(ls[0]);
    if (header.size() < 2 || header[0] != "kind" || header[1] != "concept") {
        throw FormatError("context CSV header must start with 'kind,concept'");
    }
    std::vector<PropertyId> props(header.begin() + 2, header.end());
    std::vector<ConceptRef> concepts;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (ls[i].empty()) continue;
        auto row = text::csv_parse_line(ls[i]);
        if (row.size() != header.size()) {
            throw FormatError("context CSV line " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                              " fields, expected " + std::to_string(header.size()));
        }
        ConceptKind kind;
        if (row[0] == "etype") {
            kind = ConceptKind::EntityType;
        } else if (row[0] == "entity") {
            kind = ConceptKind::Entity;
        } else {
            throw FormatError("context CSV line " + std::to_string(i + 1) + ": unknown kind '" + row[0] + "'");
        }
        concepts.push_back({kind, row[1]});
        rows.push_back(std::move(row));
    }
    FormalContext f(source, concepts, props);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t col = 0; col < props.size(); ++col) {
            const auto& v = rows[r][col + 2];
            if (v != "1" && v != "0" && v != "-1") throw FormatError("context cell '" + v + "' not in {1,0,-1}");
            f.set_cell(r, col, static_cast<std::int8_t>(std::stoi(v)));
        }
    }
    return f;
}

}  // namespace kgext::fca
