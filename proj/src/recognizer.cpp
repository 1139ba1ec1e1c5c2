#include "kgext/recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "kgext/errors.hpp"
#include "kgext/matcher.hpp"
#include "kgext/rng.hpp"
#include "kgext/text.hpp"

namespace kgext::recognizer {

namespace {

const std::vector<std::string> kLabelNames{"ngram",           "lcs",          "levenshtein",
                                           "substring",       "needleman_wunsch", "wu_palmer",
                                           "embedding_cos"};
const std::vector<std::string> kFlagNames{"wu_palmer_missing", "embedding_missing"};
const std::vector<std::string> kSimNames{"sim_h", "sim_v", "sim_i"};

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> parts) {
    std::vector<std::string> out;
    for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
    return out;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_two_classes(const Dataset& d) {
    if (d.x.empty()) throw DegenerateDataError("training set is empty");
    std::size_t pos = 0;
    for (int y : d.y) {
        if (y != 0 && y != 1) throw InvalidArgumentError("training labels must be 0 or 1");
        pos += y == 1;
    }
    if (pos == 0 || pos == d.y.size()) throw DegenerateDataError("training set contains a single class");
}

void check_finite(const Dataset& d) {
    for (const auto& row : d.x) {
        for (double v : row) {
            if (!std::isfinite(v)) throw NonFiniteError("non-finite feature value in training data");
        }
    }
}

TrainedModel model_shell(ModelKind kind, const std::vector<LabeledPair>& data, std::uint64_t seed) {
    TrainedModel m;
    m.kind = kind;
    m.features = data.front().features.kind;
    m.feature_names = layout(m.features);
    m.seed = seed;
    return m;
}

// Index of the split-point between sorted values a < b; stays strictly below b.
double midpoint(double a, double b) {
    double m = a + (b - a) / 2;
    return m < b ? m : a;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0;
    double score = 0;
};

// ---- classification tree -------------------------------------------------

double gini(double pos, double n) {
    if (n <= 0) return 0;
    double p = pos / n;
    return 1.0 - p * p - (1 - p) * (1 - p);
}

class CartBuilder {
public:
    CartBuilder(const Dataset& d, const TreeParams& p) : d_(d), p_(p) {}

    Tree build() {
        std::vector<std::size_t> idx(d_.x.size());
        std::iota(idx.begin(), idx.end(), 0);
        grow(idx, 0);
        return tree_;
    }

private:
    int grow(const std::vector<std::size_t>& idx, int depth) {
        int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double pos = 0;
        for (auto i : idx) pos += d_.y[i];
        double n = static_cast<double>(idx.size());
        tree_.nodes[id].value = pos / n;
        bool pure = pos == 0 || pos == n;
        if (pure || depth >= p_.max_depth) return id;
        auto split = best_split(idx);
        if (split.feature < 0) return id;
        std::vector<std::size_t> l, r;
        for (auto i : idx) (d_.x[i][split.feature] <= split.threshold ? l : r).push_back(i);
        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        int li = grow(l, depth + 1);
        int ri = grow(r, depth + 1);
        tree_.nodes[id].left = li;
        tree_.nodes[id].right = ri;
        return id;
    }

    SplitChoice best_split(const std::vector<std::size_t>& idx) const {
        SplitChoice best;
        best.score = std::numeric_limits<double>::infinity();
        const std::size_t n = idx.size();
        const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, p_.min_leaf));
        double total_pos = 0;
        for (auto i : idx) total_pos += d_.y[i];
        const std::size_t nf = d_.x.front().size();
        for (std::size_t f = 0; f < nf; ++f) {
            auto order = idx;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return d_.x[a][f] < d_.x[b][f] || (d_.x[a][f] == d_.x[b][f] && a < b);
            });
            double left_pos = 0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_pos += d_.y[order[k]];
                double v = d_.x[order[k]][f], w = d_.x[order[k + 1]][f];
                if (v == w) continue;
                std::size_t nl = k + 1, nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                double score = (static_cast<double>(nl) * gini(left_pos, static_cast<double>(nl)) +
                                static_cast<double>(nr) * gini(total_pos - left_pos, static_cast<double>(nr))) /
                               static_cast<double>(n);
                if (score < best.score - 1e-12) {
                    best = {static_cast<int>(f), midpoint(v, w), score};
                }
            }
        }
        return best;
    }

    const Dataset& d_;
    TreeParams p_;
    Tree tree_;
};

// ---- second-order regression tree for boosting ---------------------------

class BoostTreeBuilder {
public:
    BoostTreeBuilder(const Dataset& d, const std::vector<double>& g, const std::vector<double>& h,
                     const GbtParams& p)
        : d_(d), g_(g), h_(h), p_(p) {}

    Tree build() {
        std::vector<std::size_t> idx(d_.x.size());
        std::iota(idx.begin(), idx.end(), 0);
        grow(idx, 0);
        return tree_;
    }

private:
    double leaf_gain(double G, double H) const { return G * G / (H + p_.lambda); }

    int grow(const std::vector<std::size_t>& idx, int depth) {
        int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double G = 0, H = 0;
        for (auto i : idx) {
            G += g_[i];
            H += h_[i];
        }
        tree_.nodes[id].value = -G / (H + p_.lambda);
        if (depth >= p_.depth) return id;
        auto split = best_split(idx, G, H);
        if (split.feature < 0) return id;
        std::vector<std::size_t> l, r;
        for (auto i : idx) (d_.x[i][split.feature] <= split.threshold ? l : r).push_back(i);
        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        int li = grow(l, depth + 1);
        int ri = grow(r, depth + 1);
        tree_.nodes[id].left = li;
        tree_.nodes[id].right = ri;
        return id;
    }

    SplitChoice best_split(const std::vector<std::size_t>& idx, double G, double H) const {
        SplitChoice best;
        best.score = 1e-12;  // minimum gain
        best.feature = -1;
        const std::size_t n = idx.size();
        const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, p_.min_leaf));
        const double parent = leaf_gain(G, H);
        const std::size_t nf = d_.x.front().size();
        for (std::size_t f = 0; f < nf; ++f) {
            auto order = idx;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return d_.x[a][f] < d_.x[b][f] || (d_.x[a][f] == d_.x[b][f] && a < b);
            });
            double GL = 0, HL = 0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                GL += g_[order[k]];
                HL += h_[order[k]];
                double v = d_.x[order[k]][f], w = d_.x[order[k + 1]][f];
                if (v == w) continue;
                std::size_t nl = k + 1, nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                double gain = 0.5 * (leaf_gain(GL, HL) + leaf_gain(G - GL, H - HL) - parent);
                if (gain > best.score + 1e-12) {
                    best = {static_cast<int>(f), midpoint(v, w), gain};
                }
            }
        }
        return best;
    }

    const Dataset& d_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    GbtParams p_;
    Tree tree_;
};

double mean_logloss(const std::vector<double>& margin, const std::vector<int>& y) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += softplus(margin[i]) - y[i] * margin[i];
    return s / static_cast<double>(y.size());
}

std::vector<double> parse_doubles(const std::vector<std::string>& tok, std::size_t from) {
    std::vector<double> out;
    for (std::size_t i = from; i < tok.size(); ++i) out.push_back(text::parse_double(tok[i]));
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (double x : v) {
        out += ' ';
        out += text::format_double(x);
    }
    return out;
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::Schema: return "schema";
        case FeatureKind::Instance: return "instance";
        case FeatureKind::Property: return "property";
    }
    return "schema";
}

FeatureKind parse_feature_kind(std::string_view s) {
    if (s == "schema") return FeatureKind::Schema;
    if (s == "instance") return FeatureKind::Instance;
    if (s == "property") return FeatureKind::Property;
    throw InvalidArgumentError("unknown feature kind '" + std::string(s) + "' (expected schema|instance|property)");
}

const std::vector<std::string>& layout(FeatureKind k) {
    static const auto schema = concat({&kLabelNames, &kSimNames, &kFlagNames});
    static const auto instance = kSimNames;
    static const auto property = concat({&kLabelNames, &kFlagNames});
    switch (k) {
        case FeatureKind::Schema: return schema;
        case FeatureKind::Instance: return instance;
        case FeatureKind::Property: return property;
    }
    return schema;
}

std::vector<double> label_features(const std::string& label_a, const std::string& label_b, const LexResources& res) {
    const auto& sw = res.stopwords ? *res.stopwords : ingest::StopwordList::builtin();
    auto a = ingest::normalized_text(label_a, sw);
    auto b = ingest::normalized_text(label_b, sw);
    std::vector<double> v{lexsim::ngram_dice(a, b), lexsim::lcs_sim(a, b), lexsim::levenshtein_sim(a, b),
                          lexsim::substring_sim(a, b), lexsim::needleman_wunsch_sim(a, b)};
    std::optional<double> wp, emb;
    if (res.taxonomy) wp = lexsim::wu_palmer_sim(a, b, *res.taxonomy, sw);
    if (res.embeddings) emb = lexsim::embedding_cos(a, b, *res.embeddings, sw);
    v.push_back(wp.value_or(0.0));
    v.push_back(emb.value_or(0.0));
    v.push_back(wp ? 0.0 : 1.0);
    v.push_back(emb ? 0.0 : 1.0);
    return v;
}

FeatureVector featurize(const CandidatePair& pair, const KnowledgeGraph& a, const KnowledgeGraph& b,
                        const propsim::SimTable& sims, const LexResources& res) {
    const auto& row = sims.at(pair.left, pair.right);
    FeatureVector fv;
    if (pair.kind == PairKind::EtypeEntity) {
        fv.kind = FeatureKind::Instance;
        fv.values = {row.sim_h, row.sim_v, row.sim_i};
        return fv;
    }
    fv.kind = FeatureKind::Schema;
    auto lf = label_features(a.etype(pair.left).label, b.etype(pair.right).label, res);
    fv.values.assign(lf.begin(), lf.begin() + 7);
    fv.values.insert(fv.values.end(), {row.sim_h, row.sim_v, row.sim_i});
    fv.values.insert(fv.values.end(), lf.begin() + 7, lf.end());
    return fv;
}

std::string write_feature_csv(const std::vector<LabeledPair>& rows, FeatureKind kind, bool with_label) {
    std::vector<std::string> header{"left_id", "right_id"};
    const auto& names = layout(kind);
    header.insert(header.end(), names.begin(), names.end());
    if (with_label) header.push_back("label");
    std::string out = text::csv_line(header) + "\n";
    for (const auto& r : rows) {
        if (r.features.kind != kind || r.features.values.size() != names.size()) {
            throw LayoutMismatchError("feature row (" + r.pair.left + ", " + r.pair.right + ") has the wrong layout");
        }
        std::vector<std::string> f{r.pair.left, r.pair.right};
        for (double v : r.features.values) f.push_back(text::format_double(v));
        if (with_label) {
            if (r.label != 0 && r.label != 1) throw InvalidArgumentError("row without label in a labeled CSV");
            f.push_back(std::to_string(r.label));
        }
        out += text::csv_line(f) + "\n";
    }
    return out;
}

std::vector<LabeledPair> parse_feature_csv(std::string_view contents, FeatureKind kind) {
    auto ls = text::lines(contents);
    if (ls.empty()) throw FormatError("feature CSV is empty");
    auto header = text::csv_parse_line(ls[0]);
    const auto& names = layout(kind);
    bool with_label = header.size() == names.size() + 3;
    if (header.size() < 2 || header[0] != "left_id" || header[1] != "right_id" ||
        (header.size() != names.size() + 2 && !with_label) ||
        !std::equal(names.begin(), names.end(), header.begin() + 2) || (with_label && header.back() != "label")) {
        throw LayoutMismatchError("feature CSV header does not match the " + std::string(feature_kind_name(kind)) +
                                  " layout");
    }
    PairKind pk = kind == FeatureKind::Instance ? PairKind::EtypeEntity : PairKind::EtypeEtype;
    std::vector<LabeledPair> out;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (ls[i].empty()) continue;
        auto f = text::csv_parse_line(ls[i]);
        if (f.size() != header.size()) {
            throw FormatError("feature CSV line " + std::to_string(i + 1) + " has the wrong number of fields");
        }
        LabeledPair r;
        r.pair = {f[0], f[1], pk};
        r.features.kind = kind;
        for (std::size_t k = 0; k < names.size(); ++k) r.features.values.push_back(text::parse_double(f[k + 2]));
        if (with_label) {
            if (f.back() != "0" && f.back() != "1") throw FormatError("label must be 0 or 1");
            r.label = f.back() == "1";
        }
        out.push_back(std::move(r));
    }
    return out;
}

void attach_labels(std::vector<LabeledPair>& rows, const std::vector<Alignment>& gold) {
    std::set<std::pair<std::string, std::string>> g;
    for (const auto& a : gold) g.insert({a.left, a.right});
    for (auto& r : rows) r.label = g.count({r.pair.left, r.pair.right}) ? 1 : 0;
}

std::vector<LabeledPair> balance(const std::vector<LabeledPair>& train, double target_ratio, std::uint64_t seed) {
    std::vector<std::size_t> pos;
    std::size_t neg = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train[i].label == 1) {
            pos.push_back(i);
        } else if (train[i].label == 0) {
            ++neg;
        } else {
            throw InvalidArgumentError("balance requires labeled rows");
        }
    }
    if (pos.empty() || neg == 0) throw DegenerateDataError("balance needs at least one positive and one negative");
    if (!(target_ratio > 0) || !std::isfinite(target_ratio)) {
        throw InvalidArgumentError("target ratio must be positive");
    }
    auto needed = static_cast<std::size_t>(std::ceil(target_ratio * static_cast<double>(neg) - 1e-9));
    std::vector<LabeledPair> out = train;
    if (pos.size() >= needed) return out;
    Rng rng(seed);
    auto order = pos;
    rng.shuffle(order);
    for (std::size_t k = 0; pos.size() + k < needed; ++k) out.push_back(train[order[k % order.size()]]);
    return out;
}

// ---------------------------------------------------------------------------

std::string_view model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::LogReg: return "logreg";
        case ModelKind::Tree: return "tree";
        case ModelKind::Gbt: return "gbt";
    }
    return "logreg";
}

ModelKind parse_model_kind(std::string_view s) {
    if (s == "logreg") return ModelKind::LogReg;
    if (s == "tree") return ModelKind::Tree;
    if (s == "gbt") return ModelKind::Gbt;
    throw InvalidArgumentError("unknown model kind '" + std::string(s) + "' (expected logreg|tree|gbt)");
}

double Tree::eval(const std::vector<double>& x) const {
    if (nodes.empty()) return 0;
    int i = 0;
    while (nodes[i].feature >= 0) {
        i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].value;
}

int Tree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (nodes[i].feature >= 0) {
            d[nodes[i].left] = d[i] + 1;
            d[nodes[i].right] = d[i] + 1;
        }
    }
    return best;
}

Dataset to_dataset(const std::vector<LabeledPair>& rows) {
    Dataset d;
    if (rows.empty()) return d;
    auto kind = rows.front().features.kind;
    auto width = layout(kind).size();
    for (const auto& r : rows) {
        if (r.features.kind != kind || r.features.values.size() != width) {
            throw LayoutMismatchError("training rows mix feature layouts");
        }
        d.x.push_back(r.features.values);
        d.y.push_back(r.label);
    }
    return d;
}

double logistic_loss(const Dataset& d, const std::vector<double>& w, double b, double l2) {
    std::vector<double> margin(d.x.size());
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        double z = b;
        for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * d.x[i][k];
        margin[i] = z;
    }
    double reg = 0;
    for (double x : w) reg += x * x;
    return mean_logloss(margin, d.y) + 0.5 * l2 * reg;
}

std::vector<double> logistic_gradient(const Dataset& d, const std::vector<double>& w, double b, double l2) {
    std::vector<double> g(w.size() + 1, 0.0);
    const double n = static_cast<double>(d.x.size());
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        double z = b;
        for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * d.x[i][k];
        double r = sigmoid(z) - d.y[i];
        for (std::size_t k = 0; k < w.size(); ++k) g[k] += r * d.x[i][k];
        g.back() += r;
    }
    for (auto& x : g) x /= n;
    for (std::size_t k = 0; k < w.size(); ++k) g[k] += l2 * w[k];
    return g;
}

TrainedModel train_logreg(const std::vector<LabeledPair>& data, const LogRegParams& p, std::uint64_t seed,
                          TrainTrace* trace) {
    auto d = to_dataset(data);
    check_two_classes(d);
    check_finite(d);
    if (!(p.lr > 0) || p.epochs < 0 || p.l2 < 0) throw InvalidArgumentError("invalid logistic regression parameters");
    auto m = model_shell(ModelKind::LogReg, data, seed);
    const std::size_t nf = d.x.front().size();
    const double n = static_cast<double>(d.x.size());
    m.mean.assign(nf, 0.0);
    m.scale.assign(nf, 1.0);
    for (std::size_t k = 0; k < nf; ++k) {
        double mu = 0;
        for (const auto& row : d.x) mu += row[k];
        mu /= n;
        double var = 0;
        for (const auto& row : d.x) var += (row[k] - mu) * (row[k] - mu);
        double sd = std::sqrt(var / n);
        m.mean[k] = mu;
        m.scale[k] = sd > 0 ? sd : 1.0;
    }
    Dataset z = d;
    for (auto& row : z.x) {
        for (std::size_t k = 0; k < nf; ++k) row[k] = (row[k] - m.mean[k]) / m.scale[k];
    }
    std::vector<double> w(nf, 0.0);
    double b = 0;
    double lr = p.lr;
    double loss = logistic_loss(z, w, b, p.l2);
    if (trace) trace->loss = {loss};
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        auto g = logistic_gradient(z, w, b, p.l2);
        // Halve the step until the loss does not increase.
        for (int attempt = 0; attempt < 60; ++attempt) {
            std::vector<double> w2(nf);
            for (std::size_t k = 0; k < nf; ++k) w2[k] = w[k] - lr * g[k];
            double b2 = b - lr * g.back();
            double loss2 = logistic_loss(z, w2, b2, p.l2);
            if (!std::isfinite(loss2)) throw NonFiniteError("logistic loss became non-finite");
            if (loss2 <= loss) {
                w = std::move(w2);
                b = b2;
                loss = loss2;
                break;
            }
            lr /= 2;
        }
        if (trace) trace->loss.push_back(loss);
    }
    m.weights = std::move(w);
    m.bias = b;
    return m;
}

TrainedModel train_tree(const std::vector<LabeledPair>& data, const TreeParams& p, std::uint64_t seed) {
    auto d = to_dataset(data);
    check_two_classes(d);
    check_finite(d);
    if (p.max_depth < 0 || p.min_leaf < 1) throw InvalidArgumentError("invalid tree parameters");
    auto m = model_shell(ModelKind::Tree, data, seed);
    m.trees.push_back(CartBuilder(d, p).build());
    return m;
}

TrainedModel train_gbt(const std::vector<LabeledPair>& data, const GbtParams& p, std::uint64_t seed,
                       TrainTrace* trace) {
    auto d = to_dataset(data);
    check_two_classes(d);
    check_finite(d);
    if (p.rounds < 0 || p.depth < 0 || p.shrinkage < 0 || p.lambda < 0 || p.min_leaf < 1) {
        throw InvalidArgumentError("invalid boosting parameters");
    }
    auto m = model_shell(ModelKind::Gbt, data, seed);
    const std::size_t n = d.x.size();
    double pos = 0;
    for (int y : d.y) pos += y;
    double prior = pos / static_cast<double>(n);
    m.base_score = std::log(prior / (1 - prior));
    std::vector<double> margin(n, m.base_score);
    double loss = mean_logloss(margin, d.y);
    if (trace) trace->loss = {loss};
    if (p.shrinkage == 0) return m;
    std::vector<double> g(n), h(n);
    for (int round = 0; round < p.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double q = sigmoid(margin[i]);
            g[i] = q - d.y[i];
            h[i] = q * (1 - q);
        }
        auto tree = BoostTreeBuilder(d, g, h, p).build();
        double step = p.shrinkage;
        bool accepted = false;
        std::vector<double> out(n), next(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = tree.eval(d.x[i]);
        for (int attempt = 0; attempt < 30 && !accepted; ++attempt, step /= 2) {
            for (std::size_t i = 0; i < n; ++i) next[i] = margin[i] + step * out[i];
            double loss2 = mean_logloss(next, d.y);
            if (!std::isfinite(loss2)) throw NonFiniteError("boosting loss became non-finite");
            if (loss2 <= loss) {
                accepted = true;
                loss = loss2;
                for (auto& node : tree.nodes) {
                    if (node.feature < 0) node.value *= step;
                }
            }
        }
        if (!accepted) break;
        // Recompute margins from the scaled leaves so prediction matches training exactly.
        for (std::size_t i = 0; i < n; ++i) margin[i] += tree.eval(d.x[i]);
        loss = mean_logloss(margin, d.y);
        m.trees.push_back(std::move(tree));
        if (trace) trace->loss.push_back(loss);
    }
    return m;
}

TrainedModel train(const std::vector<LabeledPair>& data, const TrainParams& p) {
    switch (p.kind) {
        case ModelKind::LogReg: return train_logreg(data, p.logreg, p.seed);
        case ModelKind::Tree: return train_tree(data, p.tree, p.seed);
        case ModelKind::Gbt: return train_gbt(data, p.gbt, p.seed);
    }
    throw InvalidArgumentError("unknown model kind");
}

double predict_score(const TrainedModel& m, const std::vector<double>& x) {
    if (x.size() != m.feature_names.size()) {
        throw LayoutMismatchError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                                  std::to_string(m.feature_names.size()));
    }
    switch (m.kind) {
        case ModelKind::LogReg: {
            double z = m.bias;
            for (std::size_t k = 0; k < x.size(); ++k) z += m.weights[k] * ((x[k] - m.mean[k]) / m.scale[k]);
            return sigmoid(z);
        }
        case ModelKind::Tree:
            return m.trees.empty() ? 0.5 : m.trees.front().eval(x);
        case ModelKind::Gbt: {
            double z = m.base_score;
            for (const auto& t : m.trees) z += t.eval(x);
            return sigmoid(z);
        }
    }
    return 0;
}

Prediction predict(const TrainedModel& m, const FeatureVector& fv, double cutoff) {
    if (fv.kind != m.features) {
        throw LayoutMismatchError("feature vector kind '" + std::string(feature_kind_name(fv.kind)) +
                                  "' does not match model kind '" + std::string(feature_kind_name(m.features)) + "'");
    }
    double s = predict_score(m, fv.values);
    return {s >= cutoff ? 1 : 0, s};
}

std::string write_model(const TrainedModel& m) {
    std::string out = "kgext-model 1\n";
    out += "kind " + std::string(model_kind_name(m.kind)) + "\n";
    out += "layout " + std::string(feature_kind_name(m.features)) + "\n";
    out += "features " + std::to_string(m.feature_names.size());
    for (const auto& f : m.feature_names) out += " " + f;
    out += "\nseed " + std::to_string(m.seed) + "\n";
    if (m.kind == ModelKind::LogReg) {
        out += "mean" + join_doubles(m.mean) + "\n";
        out += "scale" + join_doubles(m.scale) + "\n";
        out += "weights" + join_doubles(m.weights) + "\n";
        out += "bias " + text::format_double(m.bias) + "\n";
    } else {
        if (m.kind == ModelKind::Gbt) out += "base_score " + text::format_double(m.base_score) + "\n";
        out += "trees " + std::to_string(m.trees.size()) + "\n";
        for (const auto& t : m.trees) {
            out += "tree " + std::to_string(t.nodes.size()) + "\n";
            for (const auto& nd : t.nodes) {
                out += "node " + std::to_string(nd.feature) + " " + text::format_double(nd.threshold) + " " +
                       std::to_string(nd.left) + " " + std::to_string(nd.right) + " " +
                       text::format_double(nd.value) + "\n";
            }
        }
    }
    out += "end\n";
    return out;
}

TrainedModel parse_model(std::string_view contents) {
    auto ls = text::lines(contents);
    std::size_t i = 0;
    auto next = [&](const std::string& key) {
        while (i < ls.size() && text::trim(ls[i]).empty()) ++i;
        if (i >= ls.size()) throw FormatError("model file truncated; expected '" + key + "'");
        auto t = tokens(ls[i]);
        if (t.empty() || t[0] != key) {
            throw FormatError("model file line " + std::to_string(i + 1) + ": expected '" + key + "'");
        }
        ++i;
        return t;
    };
    auto head = next("kgext-model");
    if (head.size() != 2 || head[1] != "1") throw FormatError("unsupported model file version");
    TrainedModel m;
    auto kind = next("kind");
    if (kind.size() != 2) throw FormatError("malformed 'kind' line");
    m.kind = parse_model_kind(kind[1]);
    auto lay = next("layout");
    if (lay.size() != 2) throw FormatError("malformed 'layout' line");
    m.features = parse_feature_kind(lay[1]);
    auto feats = next("features");
    if (feats.size() < 2 || static_cast<std::size_t>(text::parse_int(feats[1])) != feats.size() - 2) {
        throw FormatError("malformed 'features' line");
    }
    m.feature_names.assign(feats.begin() + 2, feats.end());
    if (m.feature_names != layout(m.features)) throw LayoutMismatchError("model features do not match its layout");
    auto seed = next("seed");
    if (seed.size() != 2) throw FormatError("malformed 'seed' line");
    m.seed = std::stoull(seed[1]);
    const auto nf = m.feature_names.size();
    if (m.kind == ModelKind::LogReg) {
        m.mean = parse_doubles(next("mean"), 1);
        m.scale = parse_doubles(next("scale"), 1);
        m.weights = parse_doubles(next("weights"), 1);
        auto bias = next("bias");
        if (bias.size() != 2) throw FormatError("malformed 'bias' line");
        m.bias = text::parse_double(bias[1]);
        if (m.mean.size() != nf || m.scale.size() != nf || m.weights.size() != nf) {
            throw LayoutMismatchError("model parameter count does not match feature count");
        }
    } else {
        if (m.kind == ModelKind::Gbt) {
            auto b = next("base_score");
            if (b.size() != 2) throw FormatError("malformed 'base_score' line");
            m.base_score = text::parse_double(b[1]);
        }
        auto nt = next("trees");
        if (nt.size() != 2) throw FormatError("malformed 'trees' line");
        auto count = text::parse_int(nt[1]);
        for (long long t = 0; t < count; ++t) {
            auto th = next("tree");
            if (th.size() != 2) throw FormatError("malformed 'tree' line");
            auto nn = text::parse_int(th[1]);
            Tree tree;
            for (long long k = 0; k < nn; ++k) {
                auto nd = next("node");
                if (nd.size() != 6) throw FormatError("malformed 'node' line");
                TreeNode node;
                node.feature = static_cast<int>(text::parse_int(nd[1]));
                node.threshold = text::parse_double(nd[2]);
                node.left = static_cast<int>(text::parse_int(nd[3]));
                node.right = static_cast<int>(text::parse_int(nd[4]));
                node.value = text::parse_double(nd[5]);
                if (node.feature >= static_cast<int>(nf) ||
                    (node.feature >= 0 && (node.left <= k || node.right <= k || node.left >= nn || node.right >= nn))) {
                    throw FormatError("tree node " + std::to_string(k) + " has invalid links");
                }
                tree.nodes.push_back(node);
            }
            m.trees.push_back(std::move(tree));
        }
    }
    next("end");
    return m;
}

// ---------------------------------------------------------------------------

double f_beta(double precision, double recall, double beta) {
    double b2 = beta * beta;
    double den = b2 * precision + recall;
    if (den <= 0) return 0;
    return (1 + b2) * precision * recall / den;
}

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& truth) {
    if (preds.size() != truth.size()) {
        throw LengthMismatchError("predictions (" + std::to_string(preds.size()) + ") and truth (" +
                                  std::to_string(truth.size()) + ") differ in length");
    }
    EvalReport r;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        bool p = preds[i] == 1, t = truth[i] == 1;
        if (p && t) ++r.tp;
        else if (p) ++r.fp;
        else if (t) ++r.fn;
        else ++r.tn;
    }
    r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    r.f_05 = f_beta(r.precision, r.recall, 0.5);
    r.f_1 = f_beta(r.precision, r.recall, 1.0);
    r.f_2 = f_beta(r.precision, r.recall, 2.0);
    return r;
}

EvalReport evaluate_alignments(const std::vector<Alignment>& predicted, const std::vector<Alignment>& gold) {
    std::set<std::pair<std::string, std::string>> p, g;
    for (const auto& a : predicted) p.insert({a.left, a.right});
    for (const auto& a : gold) g.insert({a.left, a.right});
    EvalReport r;
    for (const auto& x : p) (g.count(x) ? r.tp : r.fp)++;
    for (const auto& x : g) {
        if (!p.count(x)) ++r.fn;
    }
    r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    r.f_05 = f_beta(r.precision, r.recall, 0.5);
    r.f_1 = f_beta(r.precision, r.recall, 1.0);
    r.f_2 = f_beta(r.precision, r.recall, 2.0);
    return r;
}

std::vector<Alignment> recognize(const TrainedModel& m, const std::vector<CandidatePair>& pairs,
                                 const std::vector<FeatureVector>& features, double cutoff, bool one_to_one) {
    if (pairs.size() != features.size()) throw LengthMismatchError("pairs and feature vectors differ in length");
    std::vector<matcher::ScoredPair> accepted;
    bool instance = false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto pr = predict(m, features[i], cutoff);
        instance = pairs[i].kind == PairKind::EtypeEntity;
        if (pr.label == 1) accepted.push_back({pairs[i].left, pairs[i].right, pr.score});
    }
    if (one_to_one) {
        if (instance) {
            // Each entity keeps its best-scoring type; ties go to the smaller id.
            std::map<std::string, matcher::ScoredPair> best;
            for (const auto& a : accepted) {
                auto it = best.find(a.right);
                if (it == best.end() || a.score > it->second.score ||
                    (a.score == it->second.score && a.left < it->second.left)) {
                    best[a.right] = a;
                }
            }
            accepted.clear();
            for (const auto& [r, a] : best) accepted.push_back(a);
        } else {
            accepted = matcher::greedy_one_to_one(std::move(accepted), cutoff);
        }
    }
    std::vector<Alignment> out;
    for (const auto& a : accepted) {
        out.push_back({a.left, a.right, instance ? Relation::MemberOf : Relation::Equivalent, a.score});
    }
    std::sort(out.begin(), out.end(),
              [](const Alignment& x, const Alignment& y) { return std::tie(x.left, x.right) < std::tie(y.left, y.right); });
    return out;
}

std::vector<LabeledPair> property_training_rows(const KnowledgeGraph& a, const KnowledgeGraph& b,
                                                const std::vector<Alignment>& gold, const LexResources& res) {
    std::vector<LabeledPair> rows;
    for (const auto& [pa, x] : a.properties()) {
        for (const auto& [pb, y] : b.properties()) {
            LabeledPair r;
            r.pair = {pa, pb, PairKind::EtypeEtype};
            r.features = {FeatureKind::Property, label_features(x.raw_label, y.raw_label, res)};
            rows.push_back(std::move(r));
        }
    }
    attach_labels(rows, gold);
    return rows;
}

AlignedPropertyPairs match_properties_model(const KnowledgeGraph& a, const KnowledgeGraph& b, const TrainedModel& m,
                                            double cutoff, const LexResources& res) {
    if (m.features != FeatureKind::Property) throw LayoutMismatchError("property matching needs a property-kind model");
    std::vector<matcher::ScoredPair> scored;
    for (const auto& [pa, x] : a.properties()) {
        for (const auto& [pb, y] : b.properties()) {
            scored.push_back({pa, pb, predict_score(m, label_features(x.raw_label, y.raw_label, res))});
        }
    }
    AlignedPropertyPairs out;
    for (const auto& s : matcher::greedy_one_to_one(std::move(scored), cutoff)) {
        out.push_back({s.left, s.right, Relation::Equivalent, s.score});
    }
    return out;
}

}  // namespace kgext::recognizer
