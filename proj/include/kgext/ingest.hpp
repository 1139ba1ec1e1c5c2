#pragma once

#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "kgext/labels.hpp"
#include "kgext/model.hpp"

namespace kgext::ingest {

struct Triple {
    std::string subject;
    std::string predicate;
    std::string object;
    bool object_is_literal = false;
    // 1-based source position of the statement; not part of equality.
    std::size_t line = 0;
    std::size_t column = 0;

    friend bool operator==(const Triple& a, const Triple& b) {
        return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object &&
               a.object_is_literal == b.object_is_literal;
    }
    friend bool operator<(const Triple& a, const Triple& b) {
        return std::tie(a.subject, a.predicate, a.object, a.object_is_literal) <
               std::tie(b.subject, b.predicate, b.object, b.object_is_literal);
    }
};

struct ParseOptions {
    /// Skip malformed statements (recording a warning) instead of throwing.
    bool lenient = false;
};

/// Line-oriented N-Triples: `<s> <p> <o> .` or `<s> <p> "literal" .`, with
/// optional `@lang` / `^^<datatype>` suffixes (dropped), `_:` blank node
/// labels kept as opaque names, and `#` comments.
std::vector<Triple> parse_ntriples(std::string_view input, const ParseOptions& options = {},
                                   std::vector<std::string>* warnings = nullptr);

/// Turtle subset: @prefix, prefixed names, `a`, `;` and `,` continuations,
/// quoted literals without language tags. Throws ParseError or UnknownPrefixError.
std::vector<Triple> parse_turtle_subset(std::string_view input, const ParseOptions& options = {},
                                        std::vector<std::string>* warnings = nullptr);

std::string emit_ntriples(const std::vector<Triple>& triples);

/// Predicate vocabulary used when turning triples into graph records. Every
/// term is listed both in prefixed and in full IRI form.
struct FlattenConfig {
    std::set<std::string> type_predicates;
    std::set<std::string> subclass_predicates;
    std::set<std::string> domain_predicates;
    std::set<std::string> label_predicates;
    std::set<std::string> class_markers;
    std::set<std::string> property_markers;
    std::set<std::string> ignored_predicates;
    /// When false, triples with unrecognised predicates are dropped instead of
    /// being recorded as entity-property associations.
    bool record_unknown_predicates = true;

    static FlattenConfig defaults();
};

/// Schema triples `p domain E` give (E, p) associations, `A subClassOf B`
/// gives subclass records, `i type E` types an entity, and any other `i p o`
/// adds p to t(i) and, when o is a known entity, to t(o).
GraphRecords flatten(const std::vector<Triple>& triples, const FlattenConfig& config = FlattenConfig::defaults(),
                     const std::string& name = "");

// KG interchange file:
// {name, etypes:[{id,label,props[],superclasses[]}], entities:[{id,label,etype?,props[]}]}
GraphRecords parse_graph_json(std::string_view json);
KnowledgeGraph read_graph_json(std::string_view json, const StopwordList& stopwords = StopwordList::builtin());
KnowledgeGraph load_graph(const std::string& path, const StopwordList& stopwords = StopwordList::builtin());
/// Deterministic serialization: ids sorted, two-space indent, trailing newline.
std::string write_graph_json(const KnowledgeGraph& g);

}  // namespace kgext::ingest
