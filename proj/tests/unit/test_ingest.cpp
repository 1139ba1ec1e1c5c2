#include <doctest.h>

#include <algorithm>
#include <random>

#include "kgext/errors.hpp"
#include "kgext/ingest.hpp"
#include "kgext/labels.hpp"
#include "support.hpp"

using namespace kgext;
using namespace kgext::ingest;

namespace {

const std::string kType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const std::string kDomain = "http://www.w3.org/2000/01/rdf-schema#domain";

std::vector<Triple> sorted(std::vector<Triple> ts) {
    std::sort(ts.begin(), ts.end());
    return ts;
}

}  // namespace

TEST_CASE("n-triples single line") {
    auto ts = parse_ntriples("<a> <" + kType + "> <Person> .\n");
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].subject == "a");
    CHECK(ts[0].predicate == kType);
    CHECK(ts[0].object == "Person");
    CHECK_FALSE(ts[0].object_is_literal);
    CHECK(parse_ntriples("").empty());
}

TEST_CASE("n-triples literal, language tag, datatype and comments") {
    auto ts = parse_ntriples(
        "# comment\n"
        "<a> <p> \"hello \\\"world\\\"\"@en .\n"
        "<a> <q> \"3\"^^<http://www.w3.org/2001/XMLSchema#int> .\n"
        "_:b1 <p> <a> .\n");
    REQUIRE(ts.size() == 3);
    CHECK(ts[0].object == "hello \"world\"");
    CHECK(ts[0].object_is_literal);
    CHECK(ts[1].object == "3");
    CHECK(ts[2].subject == "_:b1");
}

TEST_CASE("n-triples missing dot is a parse error with position") {
    try {
        parse_ntriples("<a> <p> <b> .\n<a> <p> <c>\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::vector<std::string> warnings;
    auto ts = parse_ntriples("<a> <p> <b> .\n<a> <p> <c>\n", ParseOptions{true}, &warnings);
    CHECK(ts.size() == 1);
    CHECK(warnings.size() == 1);
}

TEST_CASE("turtle prefixes and continuations") {
    auto ts = parse_turtle_subset("@prefix ex: <http://x/> .\nex:a ex:p ex:b .\n");
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].subject == "http://x/a");
    CHECK(ts[0].object == "http://x/b");
    auto two = parse_turtle_subset("@prefix ex: <http://x/> .\nex:a ex:p ex:b ; ex:q ex:c .\n");
    REQUIRE(two.size() == 2);
    CHECK(two[0].subject == two[1].subject);
    CHECK(two[1].predicate == "http://x/q");
    auto comma = parse_turtle_subset("@prefix ex: <http://x/> .\nex:a a ex:T , ex:U .\n");
    REQUIRE(comma.size() == 2);
    CHECK(comma[0].predicate == kType);
    CHECK_THROWS_AS(parse_turtle_subset("ex:a ex:p ex:b .\n@prefix ex: <http://x/> .\n"), UnknownPrefixError);
}

TEST_CASE("turtle and n-triples agree on equivalent input") {
    auto ttl = parse_turtle_subset(
        "@prefix ex: <http://x/> .\n"
        "ex:a ex:p ex:b ;\n  ex:q \"lit\" .\n"
        "ex:c a ex:T .\n");
    auto nt = parse_ntriples(
        "<http://x/a> <http://x/p> <http://x/b> .\n"
        "<http://x/a> <http://x/q> \"lit\" .\n"
        "<http://x/c> <" + kType + "> <http://x/T> .\n");
    CHECK(sorted(ttl) == sorted(nt));
}

TEST_CASE("property: emit then parse round-trips the triple multiset") {
    std::mt19937_64 rng(5);
    const std::string alphabet = "abcXYZ _\"\\\n\t";
    for (int c = 0; c < 300; ++c) {
        std::vector<Triple> ts;
        int n = static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            Triple t;
            t.subject = "http://s/" + std::to_string(rng() % 4);
            t.predicate = "http://p/" + std::to_string(rng() % 3);
            t.object_is_literal = rng() % 2 == 0;
            if (t.object_is_literal) {
                int len = static_cast<int>(rng() % 6);
                for (int k = 0; k < len; ++k) t.object += alphabet[rng() % alphabet.size()];
            } else {
                t.object = "http://o/" + std::to_string(rng() % 4);
            }
            ts.push_back(t);
        }
        CHECK(sorted(parse_ntriples(emit_ntriples(ts))) == sorted(ts));
    }
}

TEST_CASE("flatten: entity-entity triple gives the property to both sides") {
    auto ts = parse_ntriples(
        "<EiffelTower> <" + kType + "> <Landmark> .\n"
        "<Paris> <" + kType + "> <City> .\n"
        "<EiffelTower> <locatedIn> <Paris> .\n"
        "<EiffelTower> <height> \"330\" .\n");
    auto g = build_graph(flatten(ts));
    CHECK(g.ent_prop("EiffelTower").count("locatedIn") == 1);
    CHECK(g.ent_prop("Paris").count("locatedIn") == 1);
    CHECK(g.ent_prop("EiffelTower").count("height") == 1);
    CHECK(g.ent_prop("Paris").count("height") == 0);
}

TEST_CASE("flatten: domain triple associates the property with the type") {
    auto ts = parse_ntriples("<LocatedIn> <" + kDomain + "> <organization> .\n");
    auto g = build_graph(flatten(ts));
    CHECK(g.prop("organization").count("LocatedIn") == 1);
    auto empty = flatten({});
    CHECK(empty.types.empty());
    CHECK(empty.entities.empty());
    CHECK(empty.subclasses.empty());
}

TEST_CASE("label normalization") {
    StopwordList sw({"has", "the", "of"});
    CHECK(normalize_label("hasAcademyAward", sw) == std::vector<std::string>{"academy", "award"});
    CHECK(normalize_label("name", sw) == std::vector<std::string>{"name"});
    CHECK(normalize_label("TheOf", sw) == std::vector<std::string>{"theof"});
    CHECK(normalize_label("PhDStudents", sw) == std::vector<std::string>{"ph", "d", "student"});
    CHECK(lemmatize("categories") == "category");
    CHECK(lemmatize("boxes") == "box");
    CHECK(lemmatize("status") == "status");
}

TEST_CASE("property: normalize_label is idempotent on its joined output") {
    std::mt19937_64 rng(9);
    const std::string alphabet = "aAbBcSsy_- ";
    const auto& sw = StopwordList::builtin();
    for (int c = 0; c < 1000; ++c) {
        std::string raw;
        int len = 1 + static_cast<int>(rng() % 12);
        for (int k = 0; k < len; ++k) raw += alphabet[rng() % alphabet.size()];
        auto once = normalized_text(raw, sw);
        CHECK(normalized_text(once, sw) == once);
    }
}

TEST_CASE("graph json round trip is byte stable") {
    auto g = testing::load("toy_a.json");
    auto text1 = write_graph_json(g);
    auto text2 = write_graph_json(read_graph_json(text1));
    CHECK(text1 == text2);
    CHECK_THROWS_AS(read_graph_json("{\"name\":\"x\",\"etypes\":[],\"entities\":[],\"extra\":1}"), FormatError);
}
