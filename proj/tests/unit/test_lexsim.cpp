#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>

#include "kgext/errors.hpp"
#include "kgext/lexsim.hpp"
#include "support.hpp"

using namespace kgext::lexsim;
using testing::near;

namespace {

// Plain recursive oracles, exponential; only for short strings.
std::size_t lev_rec(const std::string& a, const std::string& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    auto ra = a.substr(1), rb = b.substr(1);
    if (a[0] == b[0]) return lev_rec(ra, rb);
    return 1 + std::min({lev_rec(ra, b), lev_rec(a, rb), lev_rec(ra, rb)});
}

std::size_t lcs_rec(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return 0;
    if (a[0] == b[0]) return 1 + lcs_rec(a.substr(1), b.substr(1));
    return std::max(lcs_rec(a.substr(1), b), lcs_rec(a, b.substr(1)));
}

std::size_t longest_common_substring(const std::string& a, const std::string& b) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::size_t k = 0;
            while (i + k < a.size() && j + k < b.size() && a[i + k] == b[j + k]) ++k;
            best = std::max(best, k);
        }
    }
    return best;
}

double dice_oracle(const std::string& a, const std::string& b) {
    std::map<std::string, int> ga, gb;
    for (std::size_t i = 0; i + 2 <= a.size(); ++i) ga[a.substr(i, 2)]++;
    for (std::size_t i = 0; i + 2 <= b.size(); ++i) gb[b.substr(i, 2)]++;
    int na = a.size() >= 2 ? static_cast<int>(a.size()) - 1 : 0;
    int nb = b.size() >= 2 ? static_cast<int>(b.size()) - 1 : 0;
    if (a.empty() && b.empty()) return 1.0;
    if (na + nb == 0) return 0.0;
    int inter = 0;
    for (const auto& [g, c] : ga) inter += std::min(c, gb.count(g) ? gb[g] : 0);
    return 2.0 * inter / (na + nb);
}

// All alignments enumerated recursively.
int nw_rec(const std::string& a, const std::string& b) {
    if (a.empty()) return -static_cast<int>(b.size());
    if (b.empty()) return -static_cast<int>(a.size());
    int diag = nw_rec(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 1 : -1);
    return std::max({diag, nw_rec(a.substr(1), b) - 1, nw_rec(a, b.substr(1)) - 1});
}

std::string random_string(std::mt19937_64& rng, std::size_t max_len, const std::string& alphabet = "abc") {
    std::string s;
    auto len = rng() % (max_len + 1);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
}

}  // namespace

TEST_CASE("string metric examples") {
    CHECK(near(ngram_dice("night", "nacht"), 0.25));
    CHECK(ngram_dice("abc", "abc") == 1.0);
    CHECK(ngram_dice("a", "b") == 0.0);
    CHECK(near(lcs_sim("ABCBDAB", "BDCABA"), 8.0 / 13.0));
    CHECK(near(lcs_sim("ABCBDAB", "BDCABA"), 0.6154, 1e-4));
    CHECK(lcs_sim("x", "x") == 1.0);
    CHECK(lcs_sim("abc", "xyz") == 0.0);
    CHECK(levenshtein_distance("kitten", "sitting") == 3);
    CHECK(near(levenshtein_sim("kitten", "sitting"), 4.0 / 7.0));
    CHECK(levenshtein_sim("a", "a") == 1.0);
    CHECK(levenshtein_sim("", "abc") == 0.0);
    CHECK(near(substring_sim("conference", "confof"), 0.5));
    CHECK(substring_sim("same", "same") == 1.0);
    CHECK(substring_sim("abc", "xyz") == 0.0);
    CHECK(needleman_wunsch_score("ab", "cd") == -2);
    CHECK(needleman_wunsch_sim("ab", "cd") == 0.0);
    CHECK(needleman_wunsch_score("abc", "abd") == 1);
    CHECK(near(needleman_wunsch_sim("abc", "abd"), 1.0 / 3.0));
    CHECK(needleman_wunsch_sim("label", "label") == 1.0);
}

TEST_CASE("empty strings score 1 against each other") {
    CHECK(ngram_dice("", "") == 1.0);
    CHECK(lcs_sim("", "") == 1.0);
    CHECK(levenshtein_sim("", "") == 1.0);
    CHECK(substring_sim("", "") == 1.0);
    CHECK(needleman_wunsch_sim("", "") == 1.0);
}

TEST_CASE("metrics count code points, not bytes") {
    CHECK(levenshtein_distance("caf\xC3\xA9", "cafe") == 1);
    CHECK(near(levenshtein_sim("caf\xC3\xA9", "cafe"), 0.75));
}

TEST_CASE("property: metrics agree with brute-force oracles up to length 7") {
    std::mt19937_64 rng(3);
    for (int c = 0; c < 1000; ++c) {
        auto a = random_string(rng, 7), b = random_string(rng, 7);
        CHECK(levenshtein_distance(a, b) == lev_rec(a, b));
        double lcs = a.empty() && b.empty() ? 1.0 : 2.0 * lcs_rec(a, b) / (a.size() + b.size());
        CHECK(near(lcs_sim(a, b), lcs));
        double sub = a.empty() && b.empty() ? 1.0 : 2.0 * longest_common_substring(a, b) / (a.size() + b.size());
        CHECK(near(substring_sim(a, b), sub));
        CHECK(near(ngram_dice(a, b), dice_oracle(a, b)));
        if (a.size() <= 5 && b.size() <= 5) CHECK(needleman_wunsch_score(a, b) == nw_rec(a, b));
    }
}

TEST_CASE("property: string metrics are symmetric, bounded, and 1 on identity") {
    std::mt19937_64 rng(4);
    for (int c = 0; c < 1000; ++c) {
        auto a = random_string(rng, 12, "abcdxy"), b = random_string(rng, 12, "abcdxy");
        for (auto f : {&lcs_sim, &levenshtein_sim, &substring_sim}) {
            double ab = f(a, b);
            CHECK(ab == f(b, a));
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
            CHECK(f(a, a) == 1.0);
        }
        CHECK(ngram_dice(a, b) == ngram_dice(b, a));
        CHECK(needleman_wunsch_sim(a, b) == needleman_wunsch_sim(b, a));
        CHECK(needleman_wunsch_sim(a, a) == 1.0);
    }
}

namespace {

TaxonomyStore toy_taxonomy() {
    return TaxonomyStore::parse(
        "entity\t-\n"
        "animal\tentity\n"
        "dog\tanimal\n"
        "cat\tanimal\n"
        "plant\tentity\n");
}

}  // namespace

TEST_CASE("wu-palmer on a three-level taxonomy") {
    auto tax = toy_taxonomy();
    CHECK(tax.depth("entity") == 1);
    CHECK(tax.depth("dog") == 3);
    CHECK(tax.lca("dog", "cat") == std::optional<std::string>("animal"));
    CHECK(wu_palmer_terms("dog", "dog", tax) == std::optional<double>(1.0));
    CHECK(near(*wu_palmer_terms("dog", "cat", tax), 4.0 / 6.0));
    CHECK(near(*wu_palmer_terms("dog", "plant", tax), 2.0 / 5.0));
    CHECK_FALSE(wu_palmer_terms("dog", "robot", tax).has_value());
    // multi-token labels: best token pair
    CHECK(near(*wu_palmer_sim("big dog", "cat", tax), 4.0 / 6.0));
    CHECK_FALSE(wu_palmer_sim("robot", "cat", tax).has_value());
}

TEST_CASE("taxonomy rejects cycles and implicit parents become roots") {
    CHECK_THROWS_AS(TaxonomyStore::parse("a\tb\nb\ta\n"), kgext::CycleError);
    auto t = TaxonomyStore::parse("x\ty\n");
    CHECK(t.depth("y") == 1);
    CHECK(t.depth("x") == 2);
}

TEST_CASE("embedding cosine") {
    auto emb = EmbeddingStore::parse("3 2\nnorth 1 0\neast 0 1\nwest -1 0\n");
    CHECK(emb.dim() == 2);
    CHECK(near(*embedding_cos("north", "north", emb), 1.0));
    CHECK(near(*embedding_cos("north", "east", emb), 0.0));
    CHECK(near(*embedding_cos("North", "west", emb), -1.0));
    CHECK_FALSE(embedding_cos("north", "south", emb).has_value());
    // mean vector of known tokens
    CHECK(near(*embedding_cos("north east", "east", emb), std::sqrt(0.5)));
    CHECK_THROWS_AS(EmbeddingStore::parse("1 2\nx 1\n"), kgext::FormatError);
}

TEST_CASE("property: wu-palmer and embedding cosine are symmetric") {
    std::mt19937_64 rng(8);
    const std::vector<std::string> words = {"entity", "animal", "dog", "cat", "plant", "robot"};
    auto tax = toy_taxonomy();
    EmbeddingStore emb(3);
    for (const auto& w : words) {
        std::normal_distribution<double> n;
        emb.add(w, {n(rng), n(rng), n(rng)});
    }
    for (int c = 0; c < 1000; ++c) {
        auto a = words[rng() % words.size()] + " " + words[rng() % words.size()];
        auto b = words[rng() % words.size()];
        CHECK(wu_palmer_sim(a, b, tax) == wu_palmer_sim(b, a, tax));
        auto x = embedding_cos(a, b, emb), y = embedding_cos(b, a, emb);
        REQUIRE(x.has_value() == y.has_value());
        if (x) CHECK(near(*x, *y, 1e-12));
    }
}
