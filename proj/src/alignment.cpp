#include "kgext/alignment.hpp"

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext {

std::string_view relation_symbol(Relation r) {
    return r == Relation::Equivalent ? "=" : "\xE2\x88\x88";
}

Relation parse_relation(std::string_view s) {
    if (s == "=") return Relation::Equivalent;
    if (s == "\xE2\x88\x88" || s == "in") return Relation::MemberOf;
    throw FormatError("unknown alignment relation '" + std::string(s) + "'");
}

std::string_view pair_kind_name(PairKind k) {
    return k == PairKind::EtypeEtype ? "etype-etype" : "etype-entity";
}

PairKind parse_pair_kind(std::string_view s) {
    if (s == "etype-etype" || s == "schema") return PairKind::EtypeEtype;
    if (s == "etype-entity" || s == "instance") return PairKind::EtypeEntity;
    throw InvalidArgumentError("unknown pair kind '" + std::string(s) + "'");
}

std::string write_alignment_tsv(const std::vector<Alignment>& alignments) {
    std::string out;
    for (const auto& a : alignments) {
        out += a.left;
        out += '\t';
        out += a.right;
        out += '\t';
        out += relation_symbol(a.relation);
        out += '\t';
        out += text::format_double(a.confidence);
        out += '\n';
    }
    return out;
}

std::vector<Alignment> parse_alignment_tsv(std::string_view contents) {
    std::vector<Alignment> out;
    auto ls = text::lines(contents);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (text::trim(ls[i]).empty() || ls[i].front() == '#') continue;
        auto f = text::split(ls[i], '\t');
        if (f.size() != 4) {
            throw FormatError("alignment line " + std::to_string(i + 1) + ": expected 4 tab-separated fields, got " +
                              std::to_string(f.size()));
        }
        if (f[0].empty() || f[1].empty()) throw FormatError("alignment line " + std::to_string(i + 1) + ": empty id");
        double c = text::parse_double(f[3]);
        if (c < 0.0 || c > 1.0) {
            throw FormatError("alignment line " + std::to_string(i + 1) + ": confidence outside [0,1]");
        }
        out.push_back({f[0], f[1], parse_relation(f[2]), c});
    }
    return out;
}

std::string write_pairs_csv(const std::vector<CandidatePair>& pairs) {
    std::string out = "left,right,kind\n";
    for (const auto& p : pairs) out += text::csv_line({p.left, p.right, std::string(pair_kind_name(p.kind))}) + "\n";
    return out;
}

std::vector<CandidatePair> parse_pairs_csv(std::string_view contents) {
    auto ls = text::lines(contents);
    if (ls.empty() || ls[0] != "left,right,kind") throw FormatError("pairs CSV must start with 'left,right,kind'");
    std::vector<CandidatePair> out;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (ls[i].empty()) continue;
        auto f = text::csv_parse_line(ls[i]);
        if (f.size() != 3) throw FormatError("pairs CSV line " + std::to_string(i + 1) + ": expected 3 fields");
        out.push_back({f[0], f[1], parse_pair_kind(f[2])});
    }
    return out;
}

}  // namespace kgext
