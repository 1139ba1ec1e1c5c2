#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgext {

/// `=` for equivalence (property-property, etype-etype), `∈` for an entity
/// placed under an entity type.
enum class Relation { Equivalent, MemberOf };

std::string_view relation_symbol(Relation r);
Relation parse_relation(std::string_view s);

struct Alignment {
    std::string left;
    std::string right;
    Relation relation = Relation::Equivalent;
    double confidence = 1.0;

    friend bool operator==(const Alignment&, const Alignment&) = default;
};

/// Property alignments between graph A (left) and graph B (right).
using AlignedPropertyPairs = std::vector<Alignment>;

enum class PairKind { EtypeEtype, EtypeEntity };

std::string_view pair_kind_name(PairKind k);
PairKind parse_pair_kind(std::string_view s);

/// Left concept lives in graph A and is always an entity type; the right one
/// lives in graph B and is an entity type or an entity depending on kind.
struct CandidatePair {
    std::string left;
    std::string right;
    PairKind kind = PairKind::EtypeEtype;

    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
    friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

/// `left<TAB>right<TAB>relation<TAB>confidence`, one alignment per line.
/// Blank lines and lines starting with '#' are ignored on input.
std::string write_alignment_tsv(const std::vector<Alignment>& alignments);
std::vector<Alignment> parse_alignment_tsv(std::string_view contents);

/// `left,right,kind` CSV with a header row.
std::string write_pairs_csv(const std::vector<CandidatePair>& pairs);
std::vector<CandidatePair> parse_pairs_csv(std::string_view contents);

}  // namespace kgext
