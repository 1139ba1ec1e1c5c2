#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kgext::ingest {

/// Lowercase stop-word set. Membership is exact.
class StopwordList {
public:
    StopwordList() = default;
    explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}

    /// The default list compiled into the library (mirrors data/stopwords.txt).
    static const StopwordList& builtin();
    /// One token per line; blank lines and lines starting with '#' are skipped.
    static StopwordList parse(std::string_view contents);
    static StopwordList load(const std::filesystem::path& path);

    bool contains(std::string_view token) const { return words_.count(std::string(token)) > 0; }
    std::size_t size() const { return words_.size(); }
    const std::set<std::string>& words() const { return words_; }

private:
    std::set<std::string> words_;
};

/// Plural suffix stripping: -ies -> -y, -sses/-xes/-zes/-ches/-shes drop "es",
/// otherwise a trailing -s is dropped unless the word ends in ss, us or is.
/// Tokens of three characters or fewer are left alone.
std::string lemmatize(std::string_view token);

/// Splits on capital letters (acronym runs stay together), '_', '-' and
/// whitespace; lowercases; lemmatizes; drops stop-words and empty tokens. If
/// nothing survives, returns the lowercased raw label as a single token.
std::vector<std::string> normalize_label(std::string_view raw, const StopwordList& stopwords);

/// normalize_label joined by single spaces.
std::string normalized_text(std::string_view raw, const StopwordList& stopwords);

}  // namespace kgext::ingest
