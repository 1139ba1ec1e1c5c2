#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "../common/synthetic.hpp"
#include "kgext/errors.hpp"
#include "kgext/pipeline.hpp"
#include "kgext/recognizer.hpp"
#include "support.hpp"

using namespace kgext;
using namespace kgext::recognizer;
using testing::near;

TEST_CASE("feature layouts") {
    CHECK(layout(FeatureKind::Schema).size() == 12);
    CHECK(layout(FeatureKind::Instance) == std::vector<std::string>{"sim_h", "sim_v", "sim_i"});
    CHECK(layout(FeatureKind::Property).size() == 9);
    CHECK(layout(FeatureKind::Schema)[7] == "sim_h");
    CHECK(layout(FeatureKind::Schema).back() == "embedding_missing");
}

TEST_CASE("label features impute missing semantics with a flag") {
    auto emb = lexsim::EmbeddingStore::parse("1 2\nperson 1 0\n");
    LexResources res;
    res.embeddings = &emb;
    auto f = label_features("Person", "Human", res);
    REQUIRE(f.size() == 9);
    CHECK(f[5] == 0.0);  // wu_palmer, no taxonomy
    CHECK(f[6] == 0.0);  // embedding, human unknown
    CHECK(f[7] == 1.0);
    CHECK(f[8] == 1.0);
    auto same = label_features("Person", "Person", res);
    for (int k = 0; k < 5; ++k) CHECK(same[k] == 1.0);
    CHECK(same[6] == 1.0);
    CHECK(same[8] == 0.0);
}

TEST_CASE("cloned graphs: identical types score 1 on string metrics and top the sim batch") {
    auto a = testing::load("toy_a.json");
    pipeline::Resources res;
    AlignedPropertyPairs pm;
    for (const auto& [id, p] : a.properties()) pm.push_back({id, id, Relation::Equivalent, 1});
    auto pairs = matcher::gen_pairs(a, a, PairKind::EtypeEtype);
    auto sims = pipeline::similarity(a, a, pairs, pm, {});
    auto rows = pipeline::features(a, a, pairs, sims, res);
    for (const auto& r : rows) {
        if (r.pair.left != r.pair.right) continue;
        for (int k = 0; k < 5; ++k) CHECK(r.features.values[k] == 1.0);
    }
    // Athlete-Athlete has the largest raw sim_h in the batch
    double best = 0;
    for (const auto& r : sims.raw.rows()) best = std::max(best, r.sim_h);
    CHECK(sims.raw.at("Athlete", "Athlete").sim_h == best);
    CHECK(sims.normalized.at("Athlete", "Athlete").sim_h == 1.0);
    auto inst = featurize({"Athlete", "UsainBolt", PairKind::EtypeEntity}, a, a,
                          propsim::SimTable({{"Athlete", "UsainBolt", 0.1, 0.2, 0.3}}, true));
    CHECK(inst.kind == FeatureKind::Instance);
    CHECK(inst.values == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("property: featurize is symmetric under pair swap") {
    auto a = testing::load("conference/conf_a.json");
    auto b = testing::load("conference/conf_b.json");
    auto emb = lexsim::EmbeddingStore::load(testing::fixture("conference/embeddings.txt"));
    auto tax = lexsim::TaxonomyStore::load(testing::fixture("conference/taxonomy.tsv"));
    LexResources res{&emb, &tax, &ingest::StopwordList::builtin()};
    std::mt19937_64 rng(51);
    std::vector<std::string> la, lb;
    for (const auto& [id, e] : a.etypes()) la.push_back(e.label);
    for (const auto& [id, e] : b.etypes()) lb.push_back(e.label);
    for (int c = 0; c < 1000; ++c) {
        auto x = la[rng() % la.size()], y = lb[rng() % lb.size()];
        auto f = label_features(x, y, res), g = label_features(y, x, res);
        REQUIRE(f.size() == g.size());
        for (std::size_t k = 0; k < f.size(); ++k) CHECK(near(f[k], g[k], 1e-12));
    }
}

TEST_CASE("feature csv round trip") {
    std::vector<LabeledPair> rows = synthetic::xor_rows();
    auto back = parse_feature_csv(write_feature_csv(rows, FeatureKind::Instance, true), FeatureKind::Instance);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].features.values == rows[i].features.values);
        CHECK(back[i].label == rows[i].label);
    }
    CHECK_THROWS_AS(parse_feature_csv(write_feature_csv(rows, FeatureKind::Instance, true), FeatureKind::Schema),
                    LayoutMismatchError);
}

TEST_CASE("balancing") {
    auto rows = synthetic::imbalanced(5, 1000, 1);
    auto held_out = synthetic::imbalanced(3, 50, 2);
    auto before = write_feature_csv(held_out, FeatureKind::Instance, true);
    auto out = balance(rows, 0.1, 7);
    std::size_t pos = 0, neg = 0;
    for (const auto& r : out) (r.label == 1 ? pos : neg)++;
    CHECK(neg == 1000);
    CHECK(pos == 100);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(out[i].pair.left == rows[i].pair.left);
    CHECK(write_feature_csv(held_out, FeatureKind::Instance, true) == before);
    // already balanced enough
    auto ok = synthetic::imbalanced(200, 1000, 3);
    CHECK(balance(ok, 0.1, 7).size() == ok.size());
    CHECK_THROWS_AS(balance(synthetic::imbalanced(0, 10, 1), 0.1, 0), DegenerateDataError);
    // same seed, same duplicates
    auto again = balance(rows, 0.1, 7);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].pair.left == again[i].pair.left);
}

TEST_CASE("logistic gradient matches central differences") {
    auto s = synthetic::separable(200, 3);
    auto d = to_dataset(s.train);
    Rng rng(4);
    double worst = 0;
    for (int c = 0; c < 100; ++c) {
        std::vector<double> w(d.x.front().size());
        for (auto& x : w) x = rng.normal();
        double b = rng.normal();
        auto g = logistic_gradient(d, w, b, 0.01);
        const double h = 1e-5;
        for (std::size_t k = 0; k <= w.size(); ++k) {
            auto wp = w, wm = w;
            double bp = b, bm = b;
            if (k < w.size()) {
                wp[k] += h;
                wm[k] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            double fd = (logistic_loss(d, wp, bp, 0.01) - logistic_loss(d, wm, bm, 0.01)) / (2 * h);
            worst = std::max(worst, std::fabs(fd - g[k]));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("logistic regression on 1-d separable data") {
    std::vector<LabeledPair> rows;
    for (int i = -10; i <= 10; ++i) {
        if (i == 0) continue;
        LabeledPair r;
        r.features = {FeatureKind::Instance, {double(i), 0.0, 0.0}};
        r.label = i > 0;
        rows.push_back(r);
    }
    TrainTrace trace;
    auto m = train_logreg(rows, {}, 0, &trace);
    for (const auto& r : rows) CHECK(predict(m, r.features).label == r.label);
    CHECK(m.weights[0] > 0);
    // constant features carry no weight beyond what l2 allows
    CHECK(m.weights[1] == 0.0);
    for (std::size_t i = 1; i < trace.loss.size(); ++i) CHECK(trace.loss[i] <= trace.loss[i - 1]);
}

TEST_CASE("tree: single splitting feature and xor") {
    std::vector<LabeledPair> rows;
    for (int i = 0; i < 20; ++i) {
        LabeledPair r;
        r.features = {FeatureKind::Instance, {0.5, double(i), 1.0}};
        r.label = i >= 10;
        rows.push_back(r);
    }
    auto m = train_tree(rows, {6, 1});
    CHECK(m.trees.front().depth() == 1);
    CHECK(synthetic::predictions(m, rows) == synthetic::labels(rows));
    auto x = synthetic::xor_rows();
    auto t = train_tree(x, {2, 1});
    CHECK(synthetic::predictions(t, x) == synthetic::labels(x));
    CHECK_THROWS_AS(train_tree(synthetic::imbalanced(0, 5, 1)), DegenerateDataError);
}

TEST_CASE("gbt degenerate settings predict the prior") {
    auto rows = synthetic::imbalanced(10, 30, 5);
    GbtParams none;
    none.rounds = 0;
    auto m0 = train_gbt(rows, none);
    CHECK(m0.trees.empty());
    CHECK(near(m0.base_score, std::log(10.0 / 30.0)));
    CHECK(near(predict_score(m0, rows[0].features.values), 0.25));
    GbtParams flat;
    flat.shrinkage = 0;
    auto ms = train_gbt(rows, flat);
    CHECK(write_model(ms) == write_model(m0));
}

TEST_CASE("classifiers on separable synthetic data") {
    auto s = synthetic::separable(2000, 42);
    auto truth = synthetic::labels(s.test);
    auto lr = evaluate(synthetic::predictions(train_logreg(s.train), s.test), truth);
    auto gb = evaluate(synthetic::predictions(train_gbt(s.train), s.test), truth);
    CHECK(lr.f_1 >= 0.95);
    MESSAGE("logreg F1 " << lr.f_1 << ", gbt F1 " << gb.f_1);
    CHECK(gb.f_1 > 0.8);
    TrainTrace trace;
    train_gbt(s.train, {}, 0, &trace);
    for (std::size_t i = 1; i < trace.loss.size(); ++i) CHECK(trace.loss[i] <= trace.loss[i - 1] + 1e-12);
}

TEST_CASE("prediction cutoff and zero features") {
    TrainedModel m;
    m.kind = ModelKind::LogReg;
    m.features = FeatureKind::Instance;
    m.feature_names = layout(FeatureKind::Instance);
    m.mean = {0, 0, 0};
    m.scale = {1, 1, 1};
    m.weights = {1, 1, 1};
    m.bias = 0;
    auto p = predict(m, {FeatureKind::Instance, {0, 0, 0}});
    CHECK(p.score == 0.5);
    CHECK(p.label == 1);
    m.bias = -1.5;
    CHECK(near(predict(m, {FeatureKind::Instance, {0, 0, 0}}).score, 1 / (1 + std::exp(1.5))));
    CHECK_THROWS_AS(predict(m, {FeatureKind::Schema, std::vector<double>(12)}), LayoutMismatchError);
}

TEST_CASE("model files reload bit-identically and training is deterministic") {
    auto s = synthetic::separable(300, 9);
    for (auto kind : {ModelKind::LogReg, ModelKind::Tree, ModelKind::Gbt}) {
        TrainParams tp;
        tp.kind = kind;
        tp.seed = 3;
        auto m = train(s.train, tp);
        auto text = write_model(m);
        auto back = parse_model(text);
        CHECK(back == m);
        CHECK(write_model(train(s.train, tp)) == text);
        for (const auto& r : s.test) CHECK(predict_score(back, r.features.values) == predict_score(m, r.features.values));
    }
    CHECK_THROWS_AS(parse_model("kgext-model 2\n"), FormatError);
}

TEST_CASE("f-scores") {
    CHECK(near(f_beta(0.8, 0.6, 1), 0.96 / 1.4));
    CHECK(near(f_beta(0.8, 0.6, 1), 0.6857, 1e-4));
    auto perfect = evaluate({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f_2 == 1.0);
    auto none = evaluate({0, 0}, {1, 0});
    CHECK(none.precision == 0.0);
    CHECK(none.f_1 == 0.0);
    CHECK_THROWS_AS(evaluate({1}, {1, 0}), LengthMismatchError);
}

TEST_CASE("property: F2 >= F1 >= F0.5 exactly when recall >= precision") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int c = 0; c < 1000; ++c) {
        double p = u(rng), r = u(rng);
        double f05 = f_beta(p, r, 0.5), f1 = f_beta(p, r, 1), f2 = f_beta(p, r, 2);
        if (r >= p) {
            CHECK(f2 >= f1 - 1e-15);
            CHECK(f1 >= f05 - 1e-15);
        } else {
            CHECK(f05 >= f1 - 1e-15);
            CHECK(f1 >= f2 - 1e-15);
        }
    }
}

TEST_CASE("instance recognition returns every accepted membership") {
    TrainedModel m;
    m.kind = ModelKind::LogReg;
    m.features = FeatureKind::Instance;
    m.feature_names = layout(FeatureKind::Instance);
    m.mean = {0, 0, 0};
    m.scale = {1, 1, 1};
    m.weights = {1, 1, 1};
    std::vector<CandidatePair> pairs = {{"A", "x", PairKind::EtypeEntity}, {"B", "x", PairKind::EtypeEntity}};
    std::vector<FeatureVector> fvs = {{FeatureKind::Instance, {0.1, 0.1, 0.1}}, {FeatureKind::Instance, {1, 1, 1}}};
    auto al = recognize(m, pairs, fvs);
    REQUIRE(al.size() == 2);
    CHECK(al[0].left == "A");
    CHECK(al[1].left == "B");
    CHECK(al[0].relation == Relation::MemberOf);
    CHECK(al[1].confidence > al[0].confidence);
    CHECK(recognize(m, pairs, fvs, 0.6).size() == 1);
}

TEST_CASE("evaluate alignments") {
    std::vector<Alignment> gold = {{"a", "x", Relation::Equivalent, 1}, {"b", "y", Relation::Equivalent, 1}};
    std::vector<Alignment> pred = {{"a", "x", Relation::Equivalent, 0.9}, {"c", "z", Relation::Equivalent, 0.7}};
    auto e = evaluate_alignments(pred, gold);
    CHECK(e.tp == 1);
    CHECK(e.fp == 1);
    CHECK(e.fn == 1);
    CHECK(e.f_1 == 0.5);
}
