#include "kgext/labels.hpp"

#include "kgext/text.hpp"

namespace kgext::ingest {

namespace {

constexpr const char* kBuiltinStopwords[] = {
    "a",    "about", "an",   "and",  "are",   "as",    "at",    "be",   "been",
    "but",  "by",    "can",  "did",  "do",    "does",  "for",   "from", "had",
    "has",  "have",  "in",   "into", "is",    "it",    "its",   "of",   "on",
    "or",   "our",   "that", "the",  "their", "these", "this",  "those", "to",
    "was",  "were",  "which", "will", "with", "within", "without",
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower_or_digit(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }
bool is_separator(char c) { return c == '_' || c == '-' || c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split_raw(std::string_view raw) {
    std::vector<std::string> parts;
    std::string cur;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (is_separator(c)) {
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        if (is_upper(c) && !cur.empty()) {
            char prev = raw[i - 1];
            bool next_lower = i + 1 < raw.size() && raw[i + 1] >= 'a' && raw[i + 1] <= 'z';
            // "hasName" -> has|Name, "URLValue" -> URL|Value
            if (is_lower_or_digit(prev) || (is_upper(prev) && next_lower)) {
                parts.push_back(std::move(cur));
                cur.clear();
            }
        }
        cur += c;
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    return parts;
}

}  // namespace

const StopwordList& StopwordList::builtin() {
    static const StopwordList list = [] {
        std::set<std::string> words;
        for (const char* w : kBuiltinStopwords) words.emplace(w);
        return StopwordList(std::move(words));
    }();
    return list;
}

StopwordList StopwordList::parse(std::string_view contents) {
    std::set<std::string> words;
    for (const auto& line : text::lines(contents)) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        words.insert(text::to_lower_ascii(t));
    }
    return StopwordList(std::move(words));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
}

std::string lemmatize(std::string_view token) {
    std::string t(token);
    if (t.size() <= 3) return t;
    if (t.size() > 4 && ends_with(t, "ies")) return t.substr(0, t.size() - 3) + "y";
    if (ends_with(t, "sses") || ends_with(t, "xes") || ends_with(t, "zes") || ends_with(t, "ches") ||
        ends_with(t, "shes")) {
        return t.substr(0, t.size() - 2);
    }
    if (ends_with(t, "s") && !ends_with(t, "ss") && !ends_with(t, "us") && !ends_with(t, "is")) {
        return t.substr(0, t.size() - 1);
    }
    return t;
}

std::vector<std::string> normalize_label(std::string_view raw, const StopwordList& stopwords) {
    std::vector<std::string> tokens;
    for (const auto& part : split_raw(raw)) {
        auto lower = text::to_lower_ascii(part);
        if (lower.empty() || stopwords.contains(lower)) continue;
        auto lemma = lemmatize(lower);
        if (lemma.empty() || stopwords.contains(lemma)) continue;
        tokens.push_back(std::move(lemma));
    }
    if (tokens.empty()) {
        auto trimmed = text::trim(raw);
        if (trimmed.empty()) return {};
        tokens.push_back(text::to_lower_ascii(trimmed));
    }
    return tokens;
}

std::string normalized_text(std::string_view raw, const StopwordList& stopwords) {
    return text::join(normalize_label(raw, stopwords), " ");
}

}  // namespace kgext::ingest
