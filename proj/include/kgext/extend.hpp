#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgext/alignment.hpp"
#include "kgext/assess.hpp"
#include "kgext/model.hpp"
#include "kgext/propsim.hpp"
#include "kgext/recognizer.hpp"

namespace kgext::extend {

enum class ConflictPolicy { Rename, Strict };

ConflictPolicy parse_conflict_policy(std::string_view s);

struct ExtensionPlan {
    /// Reference entity type (left) aligned with candidate entity type (right).
    std::vector<Alignment> em_ali;
    /// Property alignments (reference left, candidate right). When absent they
    /// are computed with the threshold matcher at `tau`.
    std::optional<AlignedPropertyPairs> property_alignments;
    double tau = 0.8;
    /// Instance-kind model used to place leftover candidate entities. Without
    /// a model every leftover entity is discarded.
    const recognizer::TrainedModel* model = nullptr;
    double cutoff = 0.5;
    ConflictPolicy conflict = ConflictPolicy::Rename;
    /// Fold unaligned subclasses (and their entities) into the aligned type
    /// instead of attaching them as new subclasses.
    bool flatten = false;
    /// Keep unaligned candidate entity types that were not attached anywhere.
    bool keep_unaligned_etypes = false;
    propsim::Params sim_params;
    unsigned threads = 1;
};

struct MergeRecord {
    EntityId candidate_id;
    EntityId ext_id;
    EntityTypeId etype;
    std::string via;  // alignment | subclass | recognition
    double score = 1;
};

struct DiscardRecord {
    EntityId candidate_id;
    std::string reason;
};

struct RenameRecord {
    std::string kind;  // property | etype | entity
    std::string from;
    std::string to;
};

struct ComparisonRow {
    EntityTypeId etype;
    std::string query;
    double cmm_before = 0, cmm_after = 0;
    double dem_before = 0, dem_after = 0;
    double cue_e_before = 0, cue_e_after = 0;
    double cue_er_before = 0, cue_er_after = 0;
    double focus_before = 0, focus_after = 0;
    // The same three metrics min-max normalized over the union of before and after values.
    double cmm_before_norm = 0, cmm_after_norm = 0;
    double dem_before_norm = 0, dem_after_norm = 0;
    double focus_before_norm = 0, focus_after_norm = 0;
};

struct ExtensionReport {
    std::string reference;
    std::string candidate;
    std::size_t etypes_added = 0;
    std::size_t properties_added = 0;
    std::size_t entities_merged = 0;
    std::size_t entities_discarded = 0;
    std::vector<MergeRecord> merged;
    std::vector<DiscardRecord> discarded;
    std::vector<RenameRecord> renamed;
    std::vector<ComparisonRow> comparison;
};

struct ExtensionResult {
    KnowledgeGraph graph;
    ExtensionReport report;
};

/// Merges the candidate graph into the reference graph. The reference graph
/// is not modified; the result keeps the reference graph's name.
ExtensionResult extend(const KnowledgeGraph& ref, const KnowledgeGraph& cand, const ExtensionPlan& plan);

/// Per aligned reference type: CMM, DEM, Cue_e, Cue_er and Focus_e before
/// (in ref) and after (in ext). Queries default to each type's label.
std::vector<ComparisonRow> compare_assessment(const KnowledgeGraph& ref, const KnowledgeGraph& ext,
                                              const std::vector<EntityTypeId>& aligned_etypes,
                                              const std::map<EntityTypeId, std::string>& queries = {},
                                              const assess::AssessParams& params = {});

std::string write_report_json(const ExtensionReport& r);
/// Comparison rows as CSV.
std::string write_report_csv(const ExtensionReport& r);

}  // namespace kgext::extend
