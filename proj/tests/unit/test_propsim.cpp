#include <doctest.h>

#include <cmath>
#include <random>

#include "kgext/errors.hpp"
#include "kgext/fca.hpp"
#include "kgext/propsim.hpp"
#include "support.hpp"

using namespace kgext;
using namespace kgext::propsim;
using testing::near;

namespace {

// Specificities straight from the closed forms, using only graph queries.
double hs_oracle(const KnowledgeGraph& g, const PropertyId& p, double lambda) {
    double kv = std::max<std::size_t>(1, g.k_v(p).size());
    return std::exp(lambda * (1.0 - kv));
}

double vs_oracle(const KnowledgeGraph& g, const PropertyId& p) {
    int lowest = 1 << 20;
    for (const auto& e : g.k_v(p)) lowest = std::min(lowest, g.etype(e).layer);
    if (g.k_v(p).empty()) lowest = 1;
    return lowest / static_cast<double>(std::max(1, g.max_depth()));
}

double schema_is_oracle(const KnowledgeGraph& g, const PropertyId& p) {
    double k = g.etypes().size();
    double v = g.k_v(p).size();
    auto h = [](double n) { return n > 0 ? std::log(n) : 0.0; };
    if (k == 0) return 0;
    return std::max(0.0, h(k) - (v / k) * h(v) - ((k - v) / k) * h(k - v));
}

double sim_oracle(const KnowledgeGraph& a, const KnowledgeGraph& b, const AlignedPropertyPairs& pm,
                  const EntityTypeId& x, const EntityTypeId& y, SimKind kind, double lambda) {
    auto spec = [&](const KnowledgeGraph& g, const PropertyId& p) {
        switch (kind) {
            case SimKind::H:
                return hs_oracle(g, p, lambda);
            case SimKind::V:
                return vs_oracle(g, p);
            default:
                return schema_is_oracle(g, p);
        }
    };
    double total = 0;
    for (const auto& al : pm) {
        if (a.prop(x).count(al.left) && b.prop(y).count(al.right)) {
            total += spec(a, al.left) / a.prop(x).size() + spec(b, al.right) / b.prop(y).size();
        }
    }
    return total / 2;
}

AlignedPropertyPairs identity_alignment(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    AlignedPropertyPairs pm;
    for (const auto& [id, p] : a.properties()) {
        if (b.has_property(id)) pm.push_back({id, id, Relation::Equivalent, 1.0});
    }
    return pm;
}

AlignedPropertyPairs swapped(const AlignedPropertyPairs& pm) {
    AlignedPropertyPairs out;
    for (const auto& al : pm) out.push_back({al.right, al.left, al.relation, al.confidence});
    return out;
}

struct Prepared {
    fca::FormalContext ca, cb;
    SpecificityTable sa, sb;
    AlignedPropertyPairs pm;
    SimInputs in() const { return {&ca, &cb, &sa, &sb, &pm}; }
};

Prepared prepare(const KnowledgeGraph& a, const KnowledgeGraph& b, const AlignedPropertyPairs& pm,
                 const Params& params = {}) {
    return {fca::formalize(a, fca::Scope::Schema), fca::formalize(b, fca::Scope::Schema),
            SpecificityTable::build(a, params), SpecificityTable::build(b, params), pm};
}

KnowledgeGraph random_graph(std::mt19937_64& rng, const std::string& prefix) {
    GraphRecords r;
    int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
        TypeRecord t{prefix + std::to_string(i), "", {}, {}};
        for (int p = 0; p < 7; ++p) {
            if (rng() % 3 == 0) t.props.push_back("p" + std::to_string(p));
        }
        if (i > 0 && rng() % 2 == 0) t.superclasses.push_back(prefix + std::to_string(rng() % i));
        r.types.push_back(t);
    }
    return build_graph(r);
}

}  // namespace

TEST_CASE("horizontal specificity") {
    auto g = testing::load("toy_a.json");
    CHECK(near(hs(g, "name", 0.5), std::exp(-1.0)));
    CHECK(near(hs(g, "birth", 0.5), std::exp(-0.5)));
    CHECK(hs(g, "settlement", 0.5) == 1.0);
    CHECK_THROWS_AS(hs(g, "nope", 0.5), UnknownIdError);
}

TEST_CASE("vertical specificity") {
    auto g = testing::load("toy_a.json");
    CHECK(near(vs(g, "gold_medalist"), 1.0));
    CHECK(near(vs(g, "name"), 0.5));
    GraphRecords flat;
    flat.types = {{"A", "", {"x"}, {}}, {"B", "", {"y"}, {}}};
    auto f = build_graph(flat);
    CHECK(vs(f, "x") == 1.0);
    CHECK(vs(f, "y") == 1.0);
}

TEST_CASE("entropy and informational specificity") {
    auto g = testing::load("toy_a.json");
    CHECK(near(entropy(g, EntropyMode::Schema), std::log(3.0)));
    CHECK(near(entropy_of({1.0}), 0.0));
    CHECK(near(entropy_of({1, 1, 1, 1}), std::log(4.0)));
    CHECK(near(is_(g, "settlement"), std::log(3.0) - (2.0 / 3.0) * std::log(2.0)));
    CHECK(near(is_(g, "settlement"), 0.6365, 1e-4));
    GraphRecords all;
    all.types = {{"A", "", {"x"}, {}}, {"B", "", {"x"}, {}}};
    CHECK(is_(build_graph(all), "x") == 0.0);
    GraphRecords one;
    one.types = {{"A", "", {"x"}, {}}};
    CHECK(is_(build_graph(one), "x") == 0.0);
}

TEST_CASE("instance-mode entropy weights types by direct instance counts") {
    GraphRecords r;
    r.types = {{"A", "", {"x"}, {}}, {"B", "", {"y"}, {}}};
    r.entities = {{"a1", "", "A", {}}, {"a2", "", "A", {}}, {"a3", "", "A", {}}, {"b1", "", "B", {}}};
    auto g = build_graph(r);
    // F = (3, 1), N = 4
    double expect = -(3 * std::log(3.0 / 4) + 1 * std::log(1.0 / 4)) / 4;
    CHECK(near(entropy(g, EntropyMode::Instance), expect));
}

TEST_CASE("sim_h hand trace on the toy fixtures") {
    auto a = testing::load("toy_a.json");
    auto b = testing::load("toy_b.json");
    AlignedPropertyPairs pm = {{"name", "name", Relation::Equivalent, 1}, {"birth", "birth", Relation::Equivalent, 1}};
    auto p = prepare(a, b, pm);
    CandidatePair pair{"Person", "Human", PairKind::EtypeEtype};
    double expect = 0.5 * ((std::exp(-1.0) / 2 + std::exp(-0.5) / 2) + (std::exp(-0.5) / 2 + std::exp(-0.5) / 2));
    CHECK(near(sim_pair(p.in(), pair, SimKind::H), expect));
    CHECK(near(sim_pair(p.in(), pair, SimKind::H), 0.5469, 1e-4));
    // Place shares only name
    CHECK(near(sim_pair(p.in(), {"Place", "Human", PairKind::EtypeEtype}, SimKind::H),
               0.5 * (std::exp(-1.0) / 2 + std::exp(-0.5) / 2)));
    auto empty = prepare(a, b, {});
    CHECK(sim_pair(empty.in(), pair, SimKind::H) == 0.0);
}

TEST_CASE("a graph of unique properties against its own copy has sim_h 1") {
    GraphRecords r;
    r.types = {{"A", "", {"x", "y", "z"}, {}}};
    auto g = build_graph(r);
    auto p = prepare(g, g, identity_alignment(g, g));
    CHECK(near(sim_pair(p.in(), {"A", "A", PairKind::EtypeEtype}, SimKind::H), 1.0));
}

TEST_CASE("entity rows count only associated properties") {
    auto a = testing::load("toy_a.json");
    auto b = testing::load("toy_b.json");
    auto pm = identity_alignment(a, b);
    auto ca = fca::formalize(a, fca::Scope::Schema);
    auto cb = fca::formalize(b, fca::Scope::Instance);
    auto sa = SpecificityTable::build(a, {});
    auto sb = SpecificityTable::build(b, {});
    SimInputs in{&ca, &cb, &sa, &sb, &pm};
    // Athlete {name,birth,gold_medalist,team} vs UsainBolt2 {name,birth,gold_medalist}
    double s_a = hs_oracle(a, "name", 0.5) + hs_oracle(a, "birth", 0.5) + hs_oracle(a, "gold_medalist", 0.5);
    // candidate-side K_v: name, birth on Human and Artist; gold_medalist on no type
    double s_b = std::exp(-0.5) + std::exp(-0.5) + 1.0;
    double expect = 0.5 * (s_a / 4 + s_b / 3);
    CHECK(near(sim_pair(in, {"Athlete", "UsainBolt2", PairKind::EtypeEntity}, SimKind::H), expect));
}

TEST_CASE("property: sim_raw matches the closed-form oracle and is symmetric") {
    std::mt19937_64 rng(31);
    for (int c = 0; c < 1000; ++c) {
        auto a = random_graph(rng, "A");
        auto b = random_graph(rng, "B");
        auto pm = identity_alignment(a, b);
        double lambda = 0.1 + (rng() % 10) / 10.0;
        Params params;
        params.lambda = lambda;
        auto p = prepare(a, b, pm, params);
        auto q = prepare(b, a, swapped(pm), params);
        auto x = "A" + std::to_string(rng() % a.etypes().size());
        auto y = "B" + std::to_string(rng() % b.etypes().size());
        if (a.prop(x).empty() || b.prop(y).empty()) continue;
        for (auto kind : {SimKind::H, SimKind::V, SimKind::I}) {
            double s = sim_pair(p.in(), {x, y, PairKind::EtypeEtype}, kind);
            CHECK(near(s, sim_oracle(a, b, pm, x, y, kind, lambda), 1e-12));
            CHECK(near(s, sim_pair(q.in(), {y, x, PairKind::EtypeEtype}, kind), 1e-12));
        }
    }
}

TEST_CASE("property: hs decreasing in |K_v|, vs increasing in min layer, is zero at full or no coverage") {
    std::mt19937_64 rng(32);
    for (int c = 0; c < 1000; ++c) {
        double lambda = 0.01 + (rng() % 1000) / 500.0;
        int n = 1 + static_cast<int>(rng() % 20);
        // chain T0 <- T1 <- ... so layer(Ti) = i + 1; one extra type per |K_v| step
        GraphRecords r;
        for (int i = 0; i < n + 1; ++i) {
            TypeRecord t{"T" + std::to_string(i), "", {"own" + std::to_string(i)}, {}};
            if (i > 0) t.superclasses.push_back("T" + std::to_string(i - 1));
            r.types.push_back(t);
        }
        r.types[0].props.push_back("everywhere");
        r.properties.push_back({"nowhere", ""});
        auto g = build_graph(r);
        // own_i is on T_i and its descendants: |K_v| = n + 1 - i, min layer = i + 1
        for (int i = 0; i < n; ++i) {
            auto p = "own" + std::to_string(i), q = "own" + std::to_string(i + 1);
            CHECK(hs(g, p, lambda) < hs(g, q, lambda));
            CHECK(vs(g, p) < vs(g, q));
        }
        CHECK(is_(g, "everywhere") == 0.0);
        CHECK(is_(g, "nowhere") == 0.0);
    }
}

TEST_CASE("normalize_batch") {
    auto v = normalize_values({0.2, 0.8});
    CHECK(near(v[0], 0.0));
    CHECK(near(v[1], 1.0));
    CHECK(normalize_values({0.5, 0.5}) == std::vector<double>{0.5, 0.5});
    CHECK(normalize_values({0.3}) == std::vector<double>{0.5});
    CHECK(normalize_values({}).empty());
}

TEST_CASE("property: normalize_batch lies in [0,1] and preserves order") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int c = 0; c < 1000; ++c) {
        std::vector<RawSimTriple> raw(1 + rng() % 12);
        for (auto& r : raw) {
            r.sim_h = u(rng);
            r.sim_v = rng() % 3 == 0 ? 1.0 : u(rng);
            r.sim_i = std::round(u(rng));
        }
        auto norm = normalize_batch(raw);
        REQUIRE(norm.size() == raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            for (auto k : {SimKind::H, SimKind::V, SimKind::I}) {
                CHECK(norm[i].get(k) >= 0.0);
                CHECK(norm[i].get(k) <= 1.0);
                for (std::size_t j = 0; j < raw.size(); ++j) {
                    if (raw[i].get(k) < raw[j].get(k)) CHECK(norm[i].get(k) <= norm[j].get(k));
                    if (raw[i].get(k) == raw[j].get(k)) CHECK(norm[i].get(k) == norm[j].get(k));
                }
            }
        }
    }
}

TEST_CASE("property: adding an aligned associated pair never lowers sim_h") {
    std::mt19937_64 rng(34);
    for (int c = 0; c < 1000; ++c) {
        auto a = random_graph(rng, "A");
        auto b = random_graph(rng, "B");
        auto full = identity_alignment(a, b);
        if (full.empty()) continue;
        auto partial = full;
        partial.erase(partial.begin() + static_cast<long>(rng() % partial.size()));
        auto x = "A" + std::to_string(rng() % a.etypes().size());
        auto y = "B" + std::to_string(rng() % b.etypes().size());
        auto pf = prepare(a, b, full), pp = prepare(a, b, partial);
        CandidatePair pair{x, y, PairKind::EtypeEtype};
        CHECK(sim_pair(pf.in(), pair, SimKind::H) >= sim_pair(pp.in(), pair, SimKind::H));
    }
}

TEST_CASE("threads do not change sim_raw") {
    auto a = testing::load("conference/conf_a.json");
    auto b = testing::load("conference/conf_b.json");
    auto pm = identity_alignment(a, b);
    auto p = prepare(a, b, pm);
    std::vector<CandidatePair> pairs;
    for (const auto& [x, ex] : a.etypes()) {
        for (const auto& [y, ey] : b.etypes()) pairs.push_back({x, y, PairKind::EtypeEtype});
    }
    auto one = sim_raw(p.in(), pairs, 1);
    auto four = sim_raw(p.in(), pairs, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].sim_h == four[i].sim_h);
        CHECK(one[i].sim_v == four[i].sim_v);
        CHECK(one[i].sim_i == four[i].sim_i);
    }
}

TEST_CASE("simtable csv round trip and missing lookups") {
    std::vector<RawSimTriple> rows = {{"A", "B", 0.1, 0.2, 1.0 / 3.0}};
    SimTable t(rows, false);
    auto back = parse_simtable_csv(write_simtable_csv(t));
    CHECK_FALSE(back.normalized());
    CHECK(back.at("A", "B").sim_i == 1.0 / 3.0);
    CHECK_THROWS_AS(back.at("A", "C"), MissingSimError);
}
