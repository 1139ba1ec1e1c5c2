#include "kgext/ingest.hpp"

#include <cctype>
#include <map>
#include <optional>

#include <json.hpp>

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext::ingest {

namespace {

constexpr const char* kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr const char* kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
constexpr const char* kOwl = "http://www.w3.org/2002/07/owl#";

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

/// Character cursor with 1-based line/column bookkeeping.
class Cursor {
public:
    explicit Cursor(std::string_view s, std::size_t first_line = 1) : s_(s), line_(first_line) {}

    bool eof() const { return pos_ >= s_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

    char get() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

    void skip_inline_space() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
    }

    /// Skips whitespace (including newlines) and '#' comments.
    void skip_space_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else {
                break;
            }
        }
    }

    std::string read_iri() {
        if (peek() != '<') fail("expected '<'");
        get();
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated IRI");
            char c = get();
            if (c == '>') break;
            if (c == ' ' || c == '\t') fail("whitespace inside IRI");
            out += c;
        }
        if (out.empty()) fail("empty IRI");
        return out;
    }

    std::string read_blank() {
        std::string out;
        out += get();
        out += get();  // "_:"
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '.' || c == ';' || c == ',') break;
            out += get();
        }
        if (out.size() == 2) fail("empty blank node label");
        return out;
    }

    std::string read_literal() {
        if (peek() != '"') fail("expected '\"'");
        get();
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated literal");
            char c = get();
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("dangling escape");
            char e = get();
            switch (e) {
                case 't': out += '\t'; break;
                case 'b': out += '\b'; break;
                case 'n': out += '\n'; break;
                case 'r': out += '\r'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\'': out += '\''; break;
                case '\\': out += '\\'; break;
                case 'u':
                case 'U': {
                    int digits = e == 'u' ? 4 : 8;
                    char32_t cp = 0;
                    for (int k = 0; k < digits; ++k) {
                        if (eof()) fail("truncated unicode escape");
                        char h = get();
                        int v = (h >= '0' && h <= '9')   ? h - '0'
                                : (h >= 'a' && h <= 'f') ? h - 'a' + 10
                                : (h >= 'A' && h <= 'F') ? h - 'A' + 10
                                                         : -1;
                        if (v < 0) fail("bad hex digit in unicode escape");
                        cp = (cp << 4) | static_cast<char32_t>(v);
                    }
                    append_utf8(out, cp);
                    break;
                }
                default: fail(std::string("unknown escape '\\") + e + "'");
            }
        }
        return out;
    }

    /// Drops an `@lang` or `^^<datatype>` literal suffix.
    void skip_literal_suffix(bool allow_lang) {
        if (peek() == '@') {
            if (!allow_lang) fail("language tags are not supported");
            get();
            while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) get();
        } else if (peek() == '^' && peek(1) == '^') {
            get();
            get();
            if (peek() == '<') {
                read_iri();
            } else {
                while (!eof() && peek() != ' ' && peek() != '\t' && peek() != '.' && peek() != ';' &&
                       peek() != ',' && peek() != '\n')
                    get();
            }
        }
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t col_ = 1;
};

std::string escape_literal(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

std::string emit_term(const std::string& term) {
    if (term.rfind("_:", 0) == 0) return term;
    return "<" + term + ">";
}

// --- Turtle ------------------------------------------------------------------

enum class TokKind { Iri, PName, Blank, Literal, Keyword, Punct, End };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class TurtleLexer {
public:
    explicit TurtleLexer(std::string_view s) : cur_(s) {}

    Token next() {
        cur_.skip_space_and_comments();
        Token t{TokKind::End, "", cur_.line(), cur_.column()};
        if (cur_.eof()) return t;
        char c = cur_.peek();
        if (c == '<') {
            t.kind = TokKind::Iri;
            t.text = cur_.read_iri();
        } else if (c == '"') {
            t.kind = TokKind::Literal;
            t.text = cur_.read_literal();
            cur_.skip_literal_suffix(false);
        } else if (c == '.' || c == ';' || c == ',') {
            t.kind = TokKind::Punct;
            t.text = std::string(1, cur_.get());
        } else if (c == '_' && cur_.peek(1) == ':') {
            t.kind = TokKind::Blank;
            t.text = cur_.read_blank();
        } else if (c == '@') {
            cur_.get();
            std::string word;
            while (!cur_.eof() && std::isalpha(static_cast<unsigned char>(cur_.peek()))) word += cur_.get();
            if (word != "prefix") cur_.fail("unsupported directive '@" + word + "'");
            t.kind = TokKind::Keyword;
            t.text = "@prefix";
        } else {
            std::string word;
            while (!cur_.eof()) {
                char d = cur_.peek();
                if (d == ' ' || d == '\t' || d == '\r' || d == '\n' || d == '<' || d == '>' || d == '"' ||
                    d == ';' || d == ',' || d == '#' || d == '(' || d == ')' || d == '[' || d == ']' ||
                    d == '{' || d == '}')
                    break;
                // A '.' ends the word unless it is followed by another name character.
                if (d == '.') {
                    char n = cur_.peek(1);
                    if (n == '\0' || n == ' ' || n == '\t' || n == '\r' || n == '\n' || n == '#') break;
                }
                word += cur_.get();
            }
            if (word.empty()) cur_.fail(std::string("unexpected character '") + c + "'");
            if (word == "a") {
                t.kind = TokKind::Keyword;
            } else if (word.find(':') != std::string::npos) {
                t.kind = TokKind::PName;
            } else if (word == "true" || word == "false" ||
                       std::isdigit(static_cast<unsigned char>(word[0])) || word[0] == '-' || word[0] == '+') {
                t.kind = TokKind::Literal;
            } else {
                cur_.fail("unexpected token '" + word + "'");
            }
            t.text = word;
        }
        return t;
    }

private:
    Cursor cur_;
};

class TurtleParser {
public:
    TurtleParser(std::string_view s, const ParseOptions& options, std::vector<std::string>* warnings)
        : lex_(s), options_(options), warnings_(warnings) {
        advance();
    }

    std::vector<Triple> run() {
        while (tok_.kind != TokKind::End) {
            try {
                statement();
            } catch (const ParseError& e) {
                if (!options_.lenient) throw;
                if (warnings_) warnings_->push_back(e.what());
                recover();
            }
        }
        return std::move(out_);
    }

private:
    void advance() { tok_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(tok_.line, tok_.column, msg); }

    void expect_punct(char c) {
        if (tok_.kind != TokKind::Punct || tok_.text[0] != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    // Skip to just after the next '.' token.
    void recover() {
        while (tok_.kind != TokKind::End) {
            bool dot = tok_.kind == TokKind::Punct && tok_.text == ".";
            try {
                advance();
            } catch (const ParseError&) {
                // keep skipping; the lexer already consumed the bad character
            }
            if (dot) break;
        }
    }

    std::string expand(const Token& t) {
        auto colon = t.text.find(':');
        auto prefix = t.text.substr(0, colon);
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end()) {
            throw UnknownPrefixError("line " + std::to_string(t.line) + ", column " + std::to_string(t.column) +
                                     ": prefix '" + prefix + ":' used before declaration");
        }
        return it->second + t.text.substr(colon + 1);
    }

    void statement() {
        if (tok_.kind == TokKind::Keyword && tok_.text == "@prefix") {
            advance();
            if (tok_.kind != TokKind::PName || tok_.text.back() != ':') fail("expected prefix name ending in ':'");
            auto name = tok_.text.substr(0, tok_.text.size() - 1);
            advance();
            if (tok_.kind != TokKind::Iri) fail("expected IRI after prefix name");
            prefixes_[name] = tok_.text;
            advance();
            expect_punct('.');
            return;
        }
        auto line = tok_.line;
        auto column = tok_.column;
        auto subject = term(false);
        while (true) {
            auto predicate = verb();
            while (true) {
                bool literal = tok_.kind == TokKind::Literal;
                auto object = term(true);
                out_.push_back({subject, predicate, object, literal, line, column});
                if (tok_.kind == TokKind::Punct && tok_.text == ",") {
                    advance();
                    continue;
                }
                break;
            }
            if (tok_.kind == TokKind::Punct && tok_.text == ";") {
                advance();
                // A trailing ';' before '.' is allowed.
                if (tok_.kind == TokKind::Punct && tok_.text == ".") break;
                continue;
            }
            break;
        }
        expect_punct('.');
    }

    std::string verb() {
        if (tok_.kind == TokKind::Keyword && tok_.text == "a") {
            advance();
            return std::string(kRdf) + "type";
        }
        if (tok_.kind == TokKind::Literal || tok_.kind == TokKind::Blank) fail("predicate must be an IRI");
        return term(false);
    }

    std::string term(bool allow_literal) {
        std::string out;
        switch (tok_.kind) {
            case TokKind::Iri:
            case TokKind::Blank: out = tok_.text; break;
            case TokKind::PName: out = expand(tok_); break;
            case TokKind::Literal:
                if (!allow_literal) fail("literal not allowed here");
                out = tok_.text;
                break;
            default: fail("expected a term");
        }
        advance();
        return out;
    }

    TurtleLexer lex_;
    ParseOptions options_;
    std::vector<std::string>* warnings_;
    Token tok_{TokKind::End, "", 0, 0};
    std::map<std::string, std::string> prefixes_;
    std::vector<Triple> out_;
};

std::set<std::string> both_forms(const char* prefixed, const char* ns, const char* local) {
    return {std::string(prefixed) + ":" + local, std::string(ns) + local};
}

void merge_into(std::set<std::string>& dst, const std::set<std::string>& src) { dst.insert(src.begin(), src.end()); }

}  // namespace

std::vector<Triple> parse_ntriples(std::string_view input, const ParseOptions& options,
                                   std::vector<std::string>* warnings) {
    std::vector<Triple> out;
    std::size_t line_no = 0;
    for (const auto& line : text::lines(input)) {
        ++line_no;
        Cursor cur(line, line_no);
        try {
            cur.skip_inline_space();
            if (cur.eof() || cur.peek() == '#') continue;
            auto read_node = [&](bool allow_literal, bool& is_literal) {
                is_literal = false;
                if (cur.peek() == '<') return cur.read_iri();
                if (cur.peek() == '_' && cur.peek(1) == ':') return cur.read_blank();
                if (allow_literal && cur.peek() == '"') {
                    is_literal = true;
                    auto lit = cur.read_literal();
                    cur.skip_literal_suffix(true);
                    return lit;
                }
                cur.fail(allow_literal ? "expected IRI, blank node or literal" : "expected IRI or blank node");
            };
            Triple t;
            t.line = line_no;
            t.column = cur.column();
            bool lit = false;
            t.subject = read_node(false, lit);
            cur.skip_inline_space();
            if (cur.peek() != '<') cur.fail("expected predicate IRI");
            t.predicate = cur.read_iri();
            cur.skip_inline_space();
            t.object = read_node(true, t.object_is_literal);
            cur.skip_inline_space();
            if (cur.peek() != '.') cur.fail("expected '.' at end of statement");
            cur.get();
            cur.skip_inline_space();
            if (!cur.eof() && cur.peek() != '#') cur.fail("unexpected trailing characters");
            out.push_back(std::move(t));
        } catch (const ParseError& e) {
            if (!options.lenient) throw;
            if (warnings) warnings->push_back(e.what());
        }
    }
    return out;
}

std::vector<Triple> parse_turtle_subset(std::string_view input, const ParseOptions& options,
                                        std::vector<std::string>* warnings) {
    return TurtleParser(input, options, warnings).run();
}

std::string emit_ntriples(const std::vector<Triple>& triples) {
    std::string out;
    for (const auto& t : triples) {
        out += emit_term(t.subject);
        out += ' ';
        out += emit_term(t.predicate);
        out += ' ';
        out += t.object_is_literal ? "\"" + escape_literal(t.object) + "\"" : emit_term(t.object);
        out += " .\n";
    }
    return out;
}

FlattenConfig FlattenConfig::defaults() {
    FlattenConfig c;
    c.type_predicates = both_forms("rdf", kRdf, "type");
    c.subclass_predicates = both_forms("rdfs", kRdfs, "subClassOf");
    c.domain_predicates = both_forms("rdfs", kRdfs, "domain");
    c.label_predicates = both_forms("rdfs", kRdfs, "label");
    merge_into(c.class_markers, both_forms("rdfs", kRdfs, "Class"));
    merge_into(c.class_markers, both_forms("owl", kOwl, "Class"));
    merge_into(c.property_markers, both_forms("rdf", kRdf, "Property"));
    for (const char* p : {"ObjectProperty", "DatatypeProperty", "AnnotationProperty", "FunctionalProperty"}) {
        merge_into(c.property_markers, both_forms("owl", kOwl, p));
    }
    for (const char* p : {"range", "comment", "seeAlso", "isDefinedBy", "subPropertyOf"}) {
        merge_into(c.ignored_predicates, both_forms("rdfs", kRdfs, p));
    }
    for (const char* p : {"equivalentClass", "disjointWith", "inverseOf", "equivalentProperty", "sameAs",
                          "versionInfo", "imports"}) {
        merge_into(c.ignored_predicates, both_forms("owl", kOwl, p));
    }
    return c;
}

GraphRecords flatten(const std::vector<Triple>& triples, const FlattenConfig& config, const std::string& name) {
    std::set<std::string> etypes;
    std::set<std::string> properties;
    std::set<std::string> entities;
    std::map<std::string, std::set<std::string>> entity_types;

    auto is_special = [&](const std::string& p) {
        return config.type_predicates.count(p) || config.subclass_predicates.count(p) ||
               config.domain_predicates.count(p) || config.label_predicates.count(p) ||
               config.ignored_predicates.count(p);
    };

    // Pass 1: classify every term by the role it plays.
    for (const auto& t : triples) {
        if (config.subclass_predicates.count(t.predicate)) {
            etypes.insert(t.subject);
            etypes.insert(t.object);
        } else if (config.domain_predicates.count(t.predicate)) {
            properties.insert(t.subject);
            etypes.insert(t.object);
        } else if (config.type_predicates.count(t.predicate)) {
            if (config.class_markers.count(t.object)) {
                etypes.insert(t.subject);
            } else if (config.property_markers.count(t.object)) {
                properties.insert(t.subject);
            } else {
                etypes.insert(t.object);
                entity_types[t.subject].insert(t.object);
            }
        }
    }
    for (const auto& [subject, types] : entity_types) {
        if (!etypes.count(subject) && !properties.count(subject)) entities.insert(subject);
    }
    for (const auto& t : triples) {
        if (is_special(t.predicate) || !config.record_unknown_predicates) continue;
        if (!etypes.count(t.subject) && !properties.count(t.subject)) entities.insert(t.subject);
    }

    // Pass 2: emit records.
    std::map<std::string, std::string> labels;
    std::map<std::string, std::set<std::string>> type_props;
    std::map<std::string, std::set<std::string>> entity_props;
    GraphRecords out;
    out.name = name;
    for (const auto& t : triples) {
        if (config.label_predicates.count(t.predicate)) {
            if (t.object_is_literal && !labels.count(t.subject)) labels[t.subject] = t.object;
        } else if (config.subclass_predicates.count(t.predicate)) {
            out.subclasses.push_back({t.subject, t.object});
        } else if (config.domain_predicates.count(t.predicate)) {
            type_props[t.object].insert(t.subject);
        } else if (is_special(t.predicate)) {
            continue;
        } else if (config.record_unknown_predicates && entities.count(t.subject)) {
            properties.insert(t.predicate);
            entity_props[t.subject].insert(t.predicate);
            if (!t.object_is_literal && entities.count(t.object)) entity_props[t.object].insert(t.predicate);
        }
    }

    auto label_of = [&](const std::string& id) {
        auto it = labels.find(id);
        return it == labels.end() ? std::string() : it->second;
    };
    for (const auto& p : properties) out.properties.push_back({p, label_of(p)});
    for (const auto& e : etypes) {
        const auto& props = type_props[e];
        out.types.push_back({e, label_of(e), {props.begin(), props.end()}, {}});
    }
    for (const auto& i : entities) {
        EntityRecord r{i, label_of(i), std::nullopt, {}};
        auto it = entity_types.find(i);
        // Several type assertions: keep the lexicographically smallest so the
        // result does not depend on triple order.
        if (it != entity_types.end()) r.etype = *it->second.begin();
        const auto& props = entity_props[i];
        r.props.assign(props.begin(), props.end());
        out.entities.push_back(std::move(r));
    }
    return out;
}

GraphRecords parse_graph_json(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid graph JSON: ") + e.what());
    }
    auto require = [](const json& obj, const char* key, const std::string& where) -> const json& {
        if (!obj.is_object() || !obj.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
        return obj.at(key);
    };
    auto check_keys = [](const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
        if (!obj.is_object()) throw FormatError(where + ": expected an object");
        for (const auto& [key, value] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) throw FormatError(where + ": unknown field '" + key + "'");
        }
    };
    auto strings = [](const json& arr, const std::string& where) {
        if (!arr.is_array()) throw FormatError(where + ": expected an array");
        std::vector<std::string> out;
        for (const auto& v : arr) {
            if (!v.is_string()) throw FormatError(where + ": expected strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    };
    auto string_field = [&](const json& obj, const char* key, const std::string& where) {
        const auto& v = require(obj, key, where);
        if (!v.is_string()) throw FormatError(where + ": field '" + key + "' must be a string");
        return v.get<std::string>();
    };

    check_keys(doc, {"name", "etypes", "entities"}, "graph");
    GraphRecords r;
    r.name = string_field(doc, "name", "graph");
    const auto& etypes = require(doc, "etypes", "graph");
    if (!etypes.is_array()) throw FormatError("graph: 'etypes' must be an array");
    for (const auto& e : etypes) {
        check_keys(e, {"id", "label", "props", "superclasses"}, "etype");
        auto id = string_field(e, "id", "etype");
        auto where = "etype '" + id + "'";
        r.types.push_back({id, string_field(e, "label", where), strings(require(e, "props", where), where),
                           strings(require(e, "superclasses", where), where)});
    }
    const auto& entities = require(doc, "entities", "graph");
    if (!entities.is_array()) throw FormatError("graph: 'entities' must be an array");
    for (const auto& i : entities) {
        check_keys(i, {"id", "label", "etype", "props"}, "entity");
        auto id = string_field(i, "id", "entity");
        auto where = "entity '" + id + "'";
        EntityRecord er{id, string_field(i, "label", where), std::nullopt, strings(require(i, "props", where), where)};
        if (i.contains("etype") && !i.at("etype").is_null()) er.etype = string_field(i, "etype", where);
        r.entities.push_back(std::move(er));
    }
    return r;
}

KnowledgeGraph read_graph_json(std::string_view json, const StopwordList& stopwords) {
    return build_graph(parse_graph_json(json), stopwords);
}

KnowledgeGraph load_graph(const std::string& path, const StopwordList& stopwords) {
    return read_graph_json(text::read_file(path), stopwords);
}

std::string write_graph_json(const KnowledgeGraph& g) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["name"] = g.name();
    doc["etypes"] = ordered_json::array();
    for (const auto& [id, e] : g.etypes()) {
        ordered_json o;
        o["id"] = id;
        o["label"] = e.label;
        o["props"] = std::vector<std::string>(e.direct_properties.begin(), e.direct_properties.end());
        o["superclasses"] = std::vector<std::string>(e.superclasses.begin(), e.superclasses.end());
        doc["etypes"].push_back(std::move(o));
    }
    doc["entities"] = ordered_json::array();
    for (const auto& [id, i] : g.entities()) {
        ordered_json o;
        o["id"] = id;
        o["label"] = i.label;
        if (i.etype) o["etype"] = *i.etype;
        o["props"] = std::vector<std::string>(i.own_properties.begin(), i.own_properties.end());
        doc["entities"].push_back(std::move(o));
    }
    return doc.dump(2) + "\n";
}

}  // namespace kgext::ingest
