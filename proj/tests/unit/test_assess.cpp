#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "kgext/assess.hpp"
#include "kgext/errors.hpp"
#include "support.hpp"

using namespace kgext;
using namespace kgext::assess;
using testing::near;

namespace {

KnowledgeGraph graph(const std::string& name, std::vector<TypeRecord> types) {
    GraphRecords r;
    r.name = name;
    r.types = std::move(types);
    return build_graph(r);
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

// Straight from the formulas over lowercase space-separated labels.
struct Doc {
    std::vector<std::string> labels;
    double tf(const std::string& term) const {
        double n = 0;
        for (const auto& l : labels)
            for (const auto& w : words(l)) n += w == term;
        return n;
    }
    double len() const {
        double n = 0;
        for (const auto& l : labels) n += double(words(l).size());
        return n;
    }
};

double oracle_idf(const std::vector<Doc>& docs, const std::string& t) {
    double df = 0;
    for (const auto& d : docs) df += d.tf(t) > 0;
    return df == 0 ? 0 : std::log(double(docs.size()) / df);
}

KnowledgeGraph doc_graph(const std::string& name, const std::vector<std::string>& labels) {
    std::vector<TypeRecord> types;
    for (std::size_t i = 0; i < labels.size(); ++i)
        types.push_back({name + "_t" + std::to_string(i), labels[i], {"p"}, {}});
    return graph(name, types);
}

// Random forest of up to 6 types over up to 8 properties.
KnowledgeGraph random_graph(std::mt19937_64& rng, const std::string& name) {
    std::size_t n = 1 + rng() % 6;
    std::vector<TypeRecord> types;
    for (std::size_t i = 0; i < n; ++i) {
        TypeRecord t{"T" + std::to_string(i), "", {}, {}};
        for (int p = 0; p < 8; ++p)
            if (rng() % 3 == 0) t.props.push_back("p" + std::to_string(p));
        if (i > 0 && rng() % 2) t.superclasses.push_back("T" + std::to_string(rng() % i));
        types.push_back(t);
    }
    return graph(name, types);
}

}  // namespace

TEST_CASE("cue_p") {
    auto unique = graph("g", {{"A", "", {"p", "q"}, {}}, {"B", "", {"q"}, {}}});
    CHECK(cue_p(unique, "p", "A") == 1.0);
    CHECK(cue_p(unique, "p", "B") == 0.0);
    auto four = graph("g", {{"A", "", {"s"}, {}}, {"B", "", {"s"}, {}}, {"C", "", {"s"}, {}}, {"D", "", {"s"}, {}}});
    for (auto e : {"A", "B", "C", "D"}) CHECK(cue_p(four, "s", e) == 0.25);
}

TEST_CASE("cue_e and cue_er") {
    auto g = graph("g", {{"A", "", {"x", "y", "z"}, {}}, {"B", "", {"u", "v"}, {}}, {"C", "", {"u", "v"}, {}},
                         {"E", "", {}, {}}});
    CHECK(cue_e(g, "A") == 3.0);
    CHECK(cue_er(g, "A") == 1.0);
    CHECK(cue_e(g, "B") == 1.0);  // |prop|/2
    CHECK(cue_e(g, "E") == 0.0);
    CHECK_THROWS_AS(cue_er(g, "E"), EmptyPropertySetError);
    auto all = graph("g", {{"A", "", {"p", "q"}, {}}, {"B", "", {"p", "q"}, {}}, {"C", "", {"p", "q"}, {}}});
    CHECK(near(cue_er(all, "B"), 1.0 / 3));
    auto toy = testing::load("toy_a.json");
    CHECK(near(cue_er(toy, "Person"), (1.0 / 3 + 1.0 / 2) / 2));
    CHECK(near(cue_er(toy, "Person"), 0.4167, 1e-4));
}

TEST_CASE("focus_e") {
    auto g = testing::load("toy_a.json");
    auto one = focus_e({{&g, "Person"}}, 2.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].focus_e == 0.5 * (1 + 2.0));
    // Place (name, settlement) vs Person (name, birth): settlement is unique, so Place leads both terms
    auto recs = cue_records({{&g, "Person"}, {&g, "Athlete"}, {&g, "Place"}}, 1.0);
    std::vector<double> ln, er;
    for (auto e : {"Person", "Athlete", "Place"}) {
        ln.push_back(std::log(1 + cue_e(g, e)));
        er.push_back(cue_er(g, e));
    }
    auto mm = [](std::vector<double> v) {
        double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
        for (auto& x : v) x = hi > lo ? (x - lo) / (hi - lo) : 0.5;
        return v;
    };
    auto a = mm(ln), b = mm(er);
    for (std::size_t i = 0; i < 3; ++i) CHECK(near(recs[i].focus_e, a[i] + b[i]));
    auto ranked = focus_e({{&g, "Person"}, {&g, "Athlete"}, {&g, "Place"}});
    std::vector<std::pair<double, std::string>> expect;
    for (std::size_t i = 0; i < 3; ++i) expect.push_back({-(a[i] + b[i]), recs[i].etype});
    std::sort(expect.begin(), expect.end());
    for (std::size_t i = 0; i < 3; ++i) CHECK(ranked[i].etype == expect[i].second);
}

TEST_CASE("focus_e extreme type scores 1 + eta") {
    auto g = graph("g", {{"A", "", {"x", "y"}, {}}, {"B", "", {"s"}, {}}, {"C", "", {"s"}, {}}});
    auto r = focus_e({{&g, "A"}, {&g, "B"}, {&g, "C"}}, 0.7);
    CHECK(r[0].etype == "A");
    CHECK(near(r[0].focus_e, 1.7));
    CHECK(r[1].etype == "B");  // tie with C, broken by id
}

TEST_CASE("cue_k, cue_kr and focus_k") {
    auto uniq = graph("u", {{"A", "", {"x"}, {}}, {"B", "", {"y", "z"}, {}}});
    CHECK(cue_kr(uniq) == 1.0);
    auto toy = testing::load("toy_a.json");
    CHECK(near(cue_k(toy), cue_e(toy, "Person") + cue_e(toy, "Athlete") + cue_e(toy, "Place")));
    // Person 1/3+1/2, Athlete 1/3+1/2+1+1, Place 1/3+1
    CHECK(near(cue_k(toy), 5.0 / 6 + 17.0 / 6 + 4.0 / 3));
    auto twice = graph("2", {{"A", "", {"x"}, {}}, {"B", "", {"x", "y"}, {}}, {"A2", "", {"x2"}, {}},
                             {"B2", "", {"x2", "y2"}, {}}});
    auto once = graph("1", {{"A", "", {"x"}, {}}, {"B", "", {"x", "y"}, {}}});
    CHECK(near(cue_k(twice), 2 * cue_k(once)));
    CHECK(near(cue_kr(twice), cue_kr(once)));
    CHECK_THROWS_AS(cue_k(graph("e", {{"A", "", {}, {}}})), EmptyGraphError);
    auto ranked = focus_k({&once, &uniq});
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].graph == "u");
    CHECK(near(ranked[0].focus_k, 2.0));
}

TEST_CASE("balance") {
    auto all = graph("g", {{"A", "", {"p", "q"}, {}}, {"B", "", {"p", "q"}, {}}, {"C", "", {"p", "q"}, {}}});
    CHECK(near(balance(all), 1.0 / 3));
    auto lop = graph("g", {{"A", "", {"p", "q", "r"}, {}}, {"B", "", {}, {}}, {"C", "", {}, {}}, {"D", "", {}, {}}});
    CHECK(near(balance(lop), 0.25));
    CHECK(balance(graph("g", {{"A", "", {"p"}, {}}})) == 1.0);
}

TEST_CASE("cmm") {
    auto exact = graph("g", {{"Student", "student", {"p"}, {}}});
    auto partial = graph("g", {{"PhDStudent", "phd student", {"p"}, {}}});
    auto none = graph("g", {{"Course", "course", {"p"}, {}}});
    auto q = parse_query("student");
    CHECK(near(cmm(exact, q), 0.6));
    CHECK(near(cmm(partial, q), 0.4));
    CHECK(cmm(none, q) == 0.0);
    CHECK(match_label({"phd", "student"}, {"student"}) == Match::Partial);
    CHECK(match_label({"student"}, {"student"}) == Match::Exact);
    CHECK(match_label({"student"}, {"phd", "student"}) == Match::None);
}

TEST_CASE("dem") {
    auto toy = testing::load("toy_a.json");
    CHECK(dem(toy, parse_query("athlete")) == 5.0);
    CHECK(dem(toy, parse_query("volcano")) == 0.0);
    auto leaf = graph("g", {{"Root", "", {}, {}}, {"Leaf", "", {}, {"Root"}}});
    CHECK(dem(leaf, parse_query("leaf")) == 1.0);
}

TEST_CASE("tf-idf and bm25 against a formula oracle") {
    std::vector<std::vector<std::string>> corpora = {
        {"music album", "music artist", "band"}, {"album", "song"}, {"music", "album track", "label", "studio"}};
    std::vector<KnowledgeGraph> gs;
    std::vector<Doc> docs;
    for (std::size_t i = 0; i < corpora.size(); ++i) {
        gs.push_back(doc_graph("D" + std::to_string(i), corpora[i]));
        docs.push_back({corpora[i]});
    }
    std::vector<const KnowledgeGraph*> ptrs;
    for (auto& g : gs) ptrs.push_back(&g);
    auto q = parse_query("music, album, band");
    auto tf = tfidf(ptrs, q);
    double avg = 0;
    for (auto& d : docs) avg += d.len();
    avg /= double(docs.size());
    for (double b : {0.75, 0.0}) {
        auto bm = bm25(ptrs, q, 1.2, b);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            double want_tf = 0, want_bm = 0;
            for (auto t : {"music", "album", "band"}) {
                double f = docs[d].tf(t), w = oracle_idf(docs, t);
                want_tf += f * w;
                want_bm += w * f * 2.2 / (f + 1.2 * (1 - b + b * docs[d].len() / avg));
            }
            CHECK(near(tf[d], want_tf, 1e-12));
            CHECK(near(bm[d], want_bm, 1e-12));
        }
    }
    // "band" appears only in D0
    CHECK(near(tfidf(ptrs, parse_query("band"))[0], std::log(3.0)));
    // "album" appears everywhere
    for (double v : tfidf(ptrs, parse_query("album"))) CHECK(v == 0.0);
    for (double v : bm25(ptrs, parse_query("zebra"))) CHECK(v == 0.0);
    for (double v : tfidf(ptrs, Query{})) CHECK(v == 0.0);
}

TEST_CASE("bm25 with b = 0 ignores label length") {
    auto a = doc_graph("a", {"river", "x"}), b = doc_graph("b", {"river", "y z w", "v u t s"}), c = doc_graph("c", {"hill"});
    auto s = bm25({&a, &b, &c}, parse_query("river"), 1.2, 0.0);
    CHECK(near(s[0], s[1], 1e-15));
    CHECK(s[0] > 0);
}

TEST_CASE("lotus") {
    auto dis = lotus_stats({{"A", {"a", "b"}}, {"B", {"c"}}});
    REQUIRE(dis.size() == 3);
    CHECK(dis[0].count == 2);
    CHECK(dis[1].count == 1);
    CHECK(dis[2].count == 0);
    CHECK(dis[2].members == std::vector<std::string>{"A", "B"});
    auto same = lotus_stats({{"A", {"a", "b"}}, {"B", {"a", "b"}}, {"C", {"a", "b"}}});
    for (std::size_t i = 0; i + 1 < same.size(); ++i) CHECK(same[i].count == 0);
    CHECK(same.back().count == 2);
    std::vector<std::pair<std::string, std::set<std::string>>> six(6, {"x", {"p"}});
    CHECK_THROWS_AS(lotus_stats(six), TooManySetsError);
    CHECK(write_lotus_csv(dis).rfind("sets,count\n", 0) == 0);
}

TEST_CASE("property: lotus cells match powerset enumeration and sum to the union") {
    std::mt19937_64 rng(71);
    for (int c = 0; c < 1000; ++c) {
        std::size_t n = 2 + rng() % 4;
        std::vector<std::pair<std::string, std::set<std::string>>> sets(n);
        std::set<std::string> uni;
        for (std::size_t i = 0; i < n; ++i) {
            sets[i].first = "S" + std::to_string(i);
            for (int p = 0; p < 10; ++p)
                if (rng() % 3 == 0) {
                    sets[i].second.insert("p" + std::to_string(p));
                    uni.insert("p" + std::to_string(p));
                }
        }
        auto cells = lotus_stats(sets);
        std::size_t total = 0;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::size_t want = 0;
            for (const auto& p : uni) {
                bool ok = true;
                for (std::size_t i = 0; i < n; ++i) ok &= bool(sets[i].second.count(p)) == bool(mask & (1u << i));
                want += ok;
            }
            CHECK(cells[mask - 1].count == want);
            total += cells[mask - 1].count;
        }
        CHECK(total == uni.size());
    }
}

TEST_CASE("property: cue_p sums to one, cue_kr is the weighted mean of cue_er") {
    std::mt19937_64 rng(72);
    for (int c = 0; c < 1000; ++c) {
        auto g = random_graph(rng, "g");
        for (const auto& [p, _] : g.properties()) {
            if (g.k_v(p).empty()) continue;
            double s = 0;
            for (const auto& [e, __] : g.etypes()) s += cue_p(g, p, e);
            CHECK(near(s, 1.0, 1e-12));
        }
        double num = 0, den = 0;
        for (const auto& [e, _] : g.etypes()) {
            auto n = double(g.prop(e).size());
            if (n == 0) continue;
            num += n * cue_er(g, e);
            den += n;
        }
        if (den == 0) {
            CHECK_THROWS_AS(cue_kr(g), EmptyGraphError);
        } else {
            CHECK(near(cue_kr(g), num / den, 1e-12));
        }
    }
}

TEST_CASE("property: focus_e ranking is invariant under corpus duplication") {
    std::mt19937_64 rng(73);
    for (int c = 0; c < 1000; ++c) {
        auto g = random_graph(rng, "g");
        std::vector<EtypeRef> corpus;
        for (const auto& [e, _] : g.etypes()) corpus.push_back({&g, e});
        auto twice = corpus;
        twice.insert(twice.end(), corpus.begin(), corpus.end());
        auto a = cue_records(corpus), b = cue_records(twice);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(near(a[i].focus_e, b[i].focus_e, 1e-12));
            CHECK(near(a[i].focus_e, b[i + a.size()].focus_e, 1e-12));
        }
    }
}

TEST_CASE("assessment report") {
    auto toy = testing::load("toy_a.json");
    auto r = assess_corpus({&toy}, parse_query("athlete"));
    CHECK(r.etypes.size() == 3);
    REQUIRE(r.graphs.size() == 1);
    CHECK(r.graphs[0].dem == 5.0);
    auto csv = write_report_csv(r);
    CHECK(csv.find("level") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    auto empty = build_graph(GraphRecords{"empty", {}, {}, {}, {}});
    CHECK_THROWS_AS(assess_corpus({&empty}, Query{}), EmptyGraphError);
}
