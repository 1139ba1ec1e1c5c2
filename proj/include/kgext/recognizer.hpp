#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kgext/alignment.hpp"
#include "kgext/labels.hpp"
#include "kgext/lexsim.hpp"
#include "kgext/model.hpp"
#include "kgext/propsim.hpp"

namespace kgext::recognizer {

// ---------------------------------------------------------------------------
// Features

/// Schema: string and semantic metrics, property-based similarities, and two
/// missingness flags. Instance: property-based similarities only. Property:
/// the label metrics without the similarity block, used by the optional
/// learned property matcher.
enum class FeatureKind { Schema, Instance, Property };

std::string_view feature_kind_name(FeatureKind k);
FeatureKind parse_feature_kind(std::string_view s);
const std::vector<std::string>& layout(FeatureKind k);

struct FeatureVector {
    FeatureKind kind = FeatureKind::Schema;
    std::vector<double> values;
};

struct LexResources {
    const lexsim::EmbeddingStore* embeddings = nullptr;
    const lexsim::TaxonomyStore* taxonomy = nullptr;
    const ingest::StopwordList* stopwords = &ingest::StopwordList::builtin();
};

/// The seven label metrics followed by the two missingness flags. Semantic
/// metrics that are unavailable are imputed as 0 with flag 1.
std::vector<double> label_features(const std::string& label_a, const std::string& label_b, const LexResources& res);

/// Schema pairs use entity type labels plus the pair's similarity row;
/// instance pairs use the similarity row only. Throws MissingSimError.
FeatureVector featurize(const CandidatePair& pair, const KnowledgeGraph& a, const KnowledgeGraph& b,
                        const propsim::SimTable& sims, const LexResources& res = {});

struct LabeledPair {
    CandidatePair pair;
    FeatureVector features;
    int label = -1;  // -1 when unlabeled
};

/// Header `left_id,right_id,<layout names>[,label]`.
std::string write_feature_csv(const std::vector<LabeledPair>& rows, FeatureKind kind, bool with_label);
std::vector<LabeledPair> parse_feature_csv(std::string_view contents, FeatureKind kind);

/// Marks each pair positive when it appears in the gold alignment set.
void attach_labels(std::vector<LabeledPair>& rows, const std::vector<Alignment>& gold);

// ---------------------------------------------------------------------------
// Balancing

/// Duplicates positives round-robin (order fixed by the seed) until
/// positives / negatives >= target_ratio. Duplicates are appended; the input
/// rows are kept in place. Throws DegenerateDataError on single-class input.
std::vector<LabeledPair> balance(const std::vector<LabeledPair>& train, double target_ratio = 0.1,
                                 std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Models

enum class ModelKind { LogReg, Tree, Gbt };

std::string_view model_kind_name(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;  // leaf probability (tree) or leaf weight (gbt)

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double eval(const std::vector<double>& x) const;
    int depth() const;

    friend bool operator==(const Tree&, const Tree&) = default;
};

struct TrainedModel {
    ModelKind kind = ModelKind::LogReg;
    FeatureKind features = FeatureKind::Schema;
    std::vector<std::string> feature_names;
    std::uint64_t seed = 0;
    // Logistic regression works on standardized inputs.
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> weights;
    double bias = 0;
    // Trees (one for kind Tree, an additive ensemble for Gbt).
    std::vector<Tree> trees;
    double base_score = 0;  // gbt prior log-odds

    friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

struct LogRegParams {
    double lr = 0.1;
    int epochs = 500;
    double l2 = 1e-4;
};

struct TreeParams {
    int max_depth = 6;
    int min_leaf = 5;
};

struct GbtParams {
    int rounds = 100;
    int depth = 3;
    double shrinkage = 0.1;
    double lambda = 1.0;
    int min_leaf = 1;
};

struct TrainParams {
    ModelKind kind = ModelKind::LogReg;
    LogRegParams logreg;
    TreeParams tree;
    GbtParams gbt;
    std::uint64_t seed = 0;
};

/// Dense training matrix.
struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

Dataset to_dataset(const std::vector<LabeledPair>& rows);

/// Mean logistic loss plus (l2/2)||w||^2 (bias not penalized).
double logistic_loss(const Dataset& d, const std::vector<double>& w, double b, double l2);
/// Gradient of logistic_loss; the last entry is d/d bias.
std::vector<double> logistic_gradient(const Dataset& d, const std::vector<double>& w, double b, double l2);

/// Per-round training loss of the last fit, for monotonicity checks.
struct TrainTrace {
    std::vector<double> loss;
};

TrainedModel train_logreg(const std::vector<LabeledPair>& data, const LogRegParams& p = {}, std::uint64_t seed = 0,
                          TrainTrace* trace = nullptr);
TrainedModel train_tree(const std::vector<LabeledPair>& data, const TreeParams& p = {}, std::uint64_t seed = 0);
TrainedModel train_gbt(const std::vector<LabeledPair>& data, const GbtParams& p = {}, std::uint64_t seed = 0,
                       TrainTrace* trace = nullptr);
TrainedModel train(const std::vector<LabeledPair>& data, const TrainParams& p);

struct Prediction {
    int label = 0;
    double score = 0;
};

/// score >= cutoff gives label 1. Throws LayoutMismatchError.
Prediction predict(const TrainedModel& m, const FeatureVector& fv, double cutoff = 0.5);
double predict_score(const TrainedModel& m, const std::vector<double>& x);

/// Text serialization, first line `kgext-model 1`. Doubles are written in
/// shortest round-trip form so a reloaded model scores bit-identically.
std::string write_model(const TrainedModel& m);
TrainedModel parse_model(std::string_view contents);

// ---------------------------------------------------------------------------
// Evaluation

struct EvalReport {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0;
    double recall = 0;
    double f_05 = 0;
    double f_1 = 0;
    double f_2 = 0;
};

/// (1 + b^2) P R / (b^2 P + R), 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta);

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& truth);

/// Scores predicted alignments against a gold set by (left, right) identity.
EvalReport evaluate_alignments(const std::vector<Alignment>& predicted, const std::vector<Alignment>& gold);

// ---------------------------------------------------------------------------
// Schema and instance recognition over candidate pairs

/// Scores each pair. With `one_to_one`, accepted schema pairs are reduced by
/// greedy 1:1 selection on score. Returned alignments are sorted.
std::vector<Alignment> recognize(const TrainedModel& m, const std::vector<CandidatePair>& pairs,
                                 const std::vector<FeatureVector>& features, double cutoff = 0.5,
                                 bool one_to_one = false);

/// Property alignment with a trained property-kind model instead of the
/// threshold rule: greedy 1:1 over pairs scoring >= cutoff.
AlignedPropertyPairs match_properties_model(const KnowledgeGraph& a, const KnowledgeGraph& b, const TrainedModel& m,
                                            double cutoff = 0.5, const LexResources& res = {});

/// Property-kind training rows for the cross product of properties, labeled
/// by the gold property alignment.
std::vector<LabeledPair> property_training_rows(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                                const std::vector<Alignment>& gold, const LexResources& res = {});

}  // namespace kgext::recognizer
