#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "kgext/errors.hpp"
#include "kgext/model.hpp"
#include "support.hpp"

using namespace kgext;

TEST_CASE("toy-a layers and cumulative properties") {
    auto g = testing::load("toy_a.json");
    CHECK(g.etype("Person").layer == 1);
    CHECK(g.etype("Athlete").layer == 2);
    CHECK(g.max_depth() == 2);
    CHECK(g.prop("Athlete") == std::set<PropertyId>{"name", "birth", "gold_medalist", "team"});
    CHECK(g.prop("Person") == std::set<PropertyId>{"name", "birth"});
    CHECK(g.ent_prop("UsainBolt") == std::set<PropertyId>{"name", "birth", "gold_medalist"});
    CHECK(g.k_v("name") == std::set<EntityTypeId>{"Person", "Athlete", "Place"});
    CHECK(g.k_v("settlement") == std::set<EntityTypeId>{"Place"});
    CHECK_THROWS_AS(g.ent_prop("Nobody"), UnknownIdError);
}

TEST_CASE("empty records give an empty graph") {
    auto g = build_graph(GraphRecords{});
    CHECK(g.etypes().empty());
    CHECK(g.entities().empty());
    CHECK(g.max_depth() == 0);
}

TEST_CASE("subclass cycle is rejected") {
    GraphRecords r;
    r.types = {{"A", "", {}, {}}, {"B", "", {}, {}}};
    r.subclasses = {{"A", "B"}, {"B", "A"}};
    CHECK_THROWS_AS(build_graph(r), CycleError);
}

TEST_CASE("dangling and duplicate references") {
    GraphRecords r;
    r.types = {{"A", "", {}, {"Missing"}}};
    CHECK_THROWS_AS(build_graph(r), DanglingRefError);
    GraphRecords d;
    d.types = {{"A", "", {}, {}}, {"A", "", {}, {}}};
    CHECK_THROWS_AS(build_graph(d), DuplicateIdError);
}

TEST_CASE("root without properties and unused property") {
    GraphRecords r;
    r.types = {{"Thing", "", {}, {}}};
    r.properties = {{"orphan", ""}};
    auto g = build_graph(r);
    CHECK(g.prop("Thing").empty());
    CHECK(g.k_v("orphan").empty());
}

TEST_CASE("multiple inheritance takes the shortest path for the layer") {
    GraphRecords r;
    r.types = {{"R", "", {"a"}, {}}, {"M", "", {"b"}, {"R"}}, {"D", "", {"c"}, {"M", "R"}}};
    auto g = build_graph(r);
    CHECK(g.etype("D").layer == 2);
    CHECK(g.prop("D") == std::set<PropertyId>{"a", "b", "c"});
}

namespace {

// Random DAG: type i may only have parents with a smaller index.
GraphRecords random_records(std::mt19937_64& rng, int n_types, int n_props) {
    GraphRecords r;
    for (int i = 0; i < n_types; ++i) {
        TypeRecord t{"T" + std::to_string(i), "", {}, {}};
        for (int p = 0; p < n_props; ++p) {
            if (rng() % 4 == 0) t.props.push_back("p" + std::to_string(p));
        }
        for (int j = 0; j < i; ++j) {
            if (rng() % 5 == 0) t.superclasses.push_back("T" + std::to_string(j));
        }
        r.types.push_back(t);
    }
    return r;
}

}  // namespace

TEST_CASE("property: prop monotone along edges, layer one below shallowest parent, K_v agrees with prop") {
    std::mt19937_64 rng(11);
    for (int c = 0; c < 200; ++c) {
        auto rec = random_records(rng, 1 + static_cast<int>(rng() % 8), 6);
        auto g = build_graph(rec);
        for (const auto& [id, e] : g.etypes()) {
            int shallowest = 1 << 20;
            for (const auto& parent : e.superclasses) {
                const auto& pp = g.prop(parent);
                const auto& pe = g.prop(id);
                CHECK(std::includes(pe.begin(), pe.end(), pp.begin(), pp.end()));
                shallowest = std::min(shallowest, g.etype(parent).layer);
            }
            // with several parents only the shallowest one fixes the layer
            CHECK(e.layer == (e.superclasses.empty() ? 1 : shallowest + 1));
        }
        for (const auto& [pid, p] : g.properties()) {
            for (const auto& [eid, e] : g.etypes()) {
                CHECK(g.k_v(pid).count(eid) == g.prop(eid).count(pid));
            }
        }
        // record order does not matter
        auto shuffled = rec;
        std::shuffle(shuffled.types.begin(), shuffled.types.end(), rng);
        auto h = build_graph(shuffled);
        for (const auto& [id, e] : g.etypes()) {
            CHECK(h.prop(id) == g.prop(id));
            CHECK(h.etype(id).layer == e.layer);
        }
    }
}
