#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgext/alignment.hpp"
#include "kgext/fca.hpp"
#include "kgext/model.hpp"

namespace kgext::propsim {

enum class EntropyMode { Schema, Instance };

EntropyMode parse_entropy_mode(std::string_view s);

struct Params {
    double lambda = 0.5;
    /// Defaults to 1 / max_depth of the graph.
    std::optional<double> theta;
    EntropyMode entropy = EntropyMode::Schema;
};

/// Horizontal specificity e^(lambda * (1 - |K_v|)). A property used by no
/// entity type (only by entities) is treated as |K_v| = 1.
double hs(const KnowledgeGraph& g, const PropertyId& p, double lambda = 0.5);

/// Vertical specificity theta * min layer over K_v. Unused properties count as
/// layer 1.
double vs(const KnowledgeGraph& g, const PropertyId& p, std::optional<double> theta = std::nullopt);

/// (-sum F ln(F / N)) / N over the given frequencies, N = sum F. Zero
/// frequencies are skipped; an all-zero list gives 0.
double entropy_of(const std::vector<double>& freqs);

/// H(K) of the whole graph. Schema mode counts each entity type once;
/// instance mode weights each type by its number of direct instances.
double entropy(const KnowledgeGraph& g, EntropyMode mode = EntropyMode::Schema);

/// Information gain of splitting K into K_v and K \ K_v.
double is_(const KnowledgeGraph& g, const PropertyId& p, EntropyMode mode = EntropyMode::Schema);

/// Per-property specificities of one graph (positive-branch magnitudes).
class SpecificityTable {
public:
    struct Row {
        double hs = 0;
        double vs = 0;
        double is = 0;
    };

    SpecificityTable() = default;
    static SpecificityTable build(const KnowledgeGraph& g, const Params& params = {});

    const std::string& graph() const { return graph_; }
    double lambda() const { return lambda_; }
    double theta() const { return theta_; }
    int max_depth() const { return max_depth_; }
    double graph_entropy() const { return entropy_; }

    const Row& row(const PropertyId& p) const;
    bool has(const PropertyId& p) const { return rows_.count(p) > 0; }
    const std::map<PropertyId, Row>& rows() const { return rows_; }

private:
    std::string graph_;
    double lambda_ = 0.5;
    double theta_ = 1;
    int max_depth_ = 0;
    double entropy_ = 0;
    std::map<PropertyId, Row> rows_;
};

enum class SimKind { H, V, I };

struct RawSimTriple {
    std::string left;
    std::string right;
    double sim_h = 0;
    double sim_v = 0;
    double sim_i = 0;

    double get(SimKind k) const { return k == SimKind::H ? sim_h : k == SimKind::V ? sim_v : sim_i; }
};

/// Same shape; each metric mapped to [0,1] over its batch.
using NormalizedSimTriple = RawSimTriple;

/// Everything the pairwise similarity needs about the two sides.
struct SimInputs {
    const fca::FormalContext* ctx_a = nullptr;
    const fca::FormalContext* ctx_b = nullptr;
    const SpecificityTable* spec_a = nullptr;
    const SpecificityTable* spec_b = nullptr;
    const AlignedPropertyPairs* pm = nullptr;
};

/// 1/2 * sum over aligned (p_n, p_m) associated (+1) with X and with Y of
/// S_A(p_n)/|prop(X)| + S_B(p_m)/|prop(Y)|. Throws UnknownIdError when a
/// concept is missing from its context.
double sim_pair(const SimInputs& in, const CandidatePair& pair, SimKind kind);

RawSimTriple sim_triple(const SimInputs& in, const CandidatePair& pair);

/// Raw triples for every pair; `threads` > 1 splits the list across workers
/// with identical results.
std::vector<RawSimTriple> sim_raw(const SimInputs& in, const std::vector<CandidatePair>& pairs,
                                  unsigned threads = 1);

std::vector<double> sim_raw(const SimInputs& in, const std::vector<CandidatePair>& pairs, SimKind kind);

struct BatchStats {
    double mean = 0;
    double stddev = 0;
    double zmin = 0;
    double zmax = 0;
};

/// z-score, then min-max to [0,1]; constant batches map to 0.5.
std::vector<double> normalize_values(const std::vector<double>& xs, BatchStats* stats = nullptr);

std::vector<NormalizedSimTriple> normalize_batch(const std::vector<RawSimTriple>& raw);

/// Lookup table of similarity triples keyed by (left, right).
class SimTable {
public:
    SimTable() = default;
    SimTable(std::vector<RawSimTriple> rows, bool normalized);

    bool normalized() const { return normalized_; }
    const std::vector<RawSimTriple>& rows() const { return rows_; }
    /// Throws MissingSimError.
    const RawSimTriple& at(const std::string& left, const std::string& right) const;
    bool contains(const std::string& left, const std::string& right) const;

private:
    std::vector<RawSimTriple> rows_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
    bool normalized_ = false;
};

/// `# kgext simtable variant=raw|normalized`, then
/// `left_id,right_id,sim_h,sim_v,sim_i` and one row per pair.
std::string write_simtable_csv(const SimTable& t);
SimTable parse_simtable_csv(std::string_view contents);

}  // namespace kgext::propsim
