#include "kgext/config.hpp"

#include <functional>

#include "kgext/errors.hpp"
#include "kgext/text.hpp"

namespace kgext::config {

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        return text::parse_double(v);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& v, long long lo) {
    long long x;
    try {
        x = text::parse_int(v);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    if (x < lo) throw ConfigError(key + ": must be at least " + std::to_string(lo));
    return x;
}

std::string b(bool x) { return x ? "true" : "false"; }
std::string d(double x) { return text::format_double(x); }

struct Key {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Key>& table() {
    using C = RunConfig;
    using S = const std::string&;
    static const std::map<std::string, Key> t = {
        {"paths.ref", {[](C& c, S, S v) { c.ref = v; }, [](const C& c) { return c.ref; }}},
        {"paths.cand", {[](C& c, S, S v) { c.cand = v; }, [](const C& c) { return c.cand; }}},
        {"paths.stopwords", {[](C& c, S, S v) { c.stopwords = v; }, [](const C& c) { return c.stopwords; }}},
        {"paths.embeddings", {[](C& c, S, S v) { c.embeddings = v; }, [](const C& c) { return c.embeddings; }}},
        {"paths.taxonomy", {[](C& c, S, S v) { c.taxonomy = v; }, [](const C& c) { return c.taxonomy; }}},
        {"paths.out", {[](C& c, S, S v) { c.out = v; }, [](const C& c) { return c.out; }}},
        {"ingest.lenient", {[](C& c, S k, S v) { c.lenient = parse_bool(k, v); }, [](const C& c) { return b(c.lenient); }}},
        {"propsim.lambda",
         {[](C& c, S k, S v) { c.propsim.lambda = parse_real(k, v); }, [](const C& c) { return d(c.propsim.lambda); }}},
        {"propsim.theta",
         {[](C& c, S k, S v) {
              if (v == "auto") {
                  c.propsim.theta.reset();
              } else {
                  c.propsim.theta = parse_real(k, v);
              }
          },
          [](const C& c) { return c.propsim.theta ? d(*c.propsim.theta) : std::string("auto"); }}},
        {"propsim.entropy",
         {[](C& c, S k, S v) {
              try {
                  c.propsim.entropy = propsim::parse_entropy_mode(v);
              } catch (const Error& e) {
                  throw ConfigError(k + ": " + e.what());
              }
          },
          [](const C& c) {
              return std::string(c.propsim.entropy == propsim::EntropyMode::Schema ? "schema" : "instance");
          }}},
        {"matcher.tau", {[](C& c, S k, S v) { c.tau = parse_real(k, v); }, [](const C& c) { return d(c.tau); }}},
        {"matcher.ps_threshold",
         {[](C& c, S k, S v) { c.ps_threshold = parse_real(k, v); }, [](const C& c) { return d(c.ps_threshold); }}},
        {"matcher.many_to_many",
         {[](C& c, S k, S v) { c.many_to_many = parse_bool(k, v); }, [](const C& c) { return b(c.many_to_many); }}},
        {"recognizer.cutoff", {[](C& c, S k, S v) { c.cutoff = parse_real(k, v); }, [](const C& c) { return d(c.cutoff); }}},
        {"recognizer.one_to_one",
         {[](C& c, S k, S v) { c.one_to_one = parse_bool(k, v); }, [](const C& c) { return b(c.one_to_one); }}},
        {"recognizer.model",
         {[](C& c, S k, S v) {
              try {
                  c.train.kind = recognizer::parse_model_kind(v);
              } catch (const Error& e) {
                  throw ConfigError(k + ": " + e.what());
              }
          },
          [](const C& c) { return std::string(recognizer::model_kind_name(c.train.kind)); }}},
        {"logreg.lr", {[](C& c, S k, S v) { c.train.logreg.lr = parse_real(k, v); }, [](const C& c) { return d(c.train.logreg.lr); }}},
        {"logreg.epochs",
         {[](C& c, S k, S v) { c.train.logreg.epochs = static_cast<int>(parse_integer(k, v, 0)); },
          [](const C& c) { return std::to_string(c.train.logreg.epochs); }}},
        {"logreg.l2", {[](C& c, S k, S v) { c.train.logreg.l2 = parse_real(k, v); }, [](const C& c) { return d(c.train.logreg.l2); }}},
        {"tree.max_depth",
         {[](C& c, S k, S v) { c.train.tree.max_depth = static_cast<int>(parse_integer(k, v, 0)); },
          [](const C& c) { return std::to_string(c.train.tree.max_depth); }}},
        {"tree.min_leaf",
         {[](C& c, S k, S v) { c.train.tree.min_leaf = static_cast<int>(parse_integer(k, v, 1)); },
          [](const C& c) { return std::to_string(c.train.tree.min_leaf); }}},
        {"gbt.rounds",
         {[](C& c, S k, S v) { c.train.gbt.rounds = static_cast<int>(parse_integer(k, v, 0)); },
          [](const C& c) { return std::to_string(c.train.gbt.rounds); }}},
        {"gbt.depth",
         {[](C& c, S k, S v) { c.train.gbt.depth = static_cast<int>(parse_integer(k, v, 0)); },
          [](const C& c) { return std::to_string(c.train.gbt.depth); }}},
        {"gbt.shrinkage",
         {[](C& c, S k, S v) { c.train.gbt.shrinkage = parse_real(k, v); }, [](const C& c) { return d(c.train.gbt.shrinkage); }}},
        {"gbt.lambda",
         {[](C& c, S k, S v) { c.train.gbt.lambda = parse_real(k, v); }, [](const C& c) { return d(c.train.gbt.lambda); }}},
        {"gbt.min_leaf",
         {[](C& c, S k, S v) { c.train.gbt.min_leaf = static_cast<int>(parse_integer(k, v, 1)); },
          [](const C& c) { return std::to_string(c.train.gbt.min_leaf); }}},
        {"balance.ratio",
         {[](C& c, S k, S v) { c.balance_ratio = parse_real(k, v); }, [](const C& c) { return d(c.balance_ratio); }}},
        {"balance.enabled",
         {[](C& c, S k, S v) { c.balance = parse_bool(k, v); }, [](const C& c) { return b(c.balance); }}},
        {"assess.eta", {[](C& c, S k, S v) { c.assess.eta = parse_real(k, v); }, [](const C& c) { return d(c.assess.eta); }}},
        {"assess.mu", {[](C& c, S k, S v) { c.assess.mu = parse_real(k, v); }, [](const C& c) { return d(c.assess.mu); }}},
        {"assess.alpha", {[](C& c, S k, S v) { c.assess.alpha = parse_real(k, v); }, [](const C& c) { return d(c.assess.alpha); }}},
        {"assess.beta", {[](C& c, S k, S v) { c.assess.beta = parse_real(k, v); }, [](const C& c) { return d(c.assess.beta); }}},
        {"assess.dem_w", {[](C& c, S k, S v) { c.assess.dem_w = parse_real(k, v); }, [](const C& c) { return d(c.assess.dem_w); }}},
        {"assess.bm25_m", {[](C& c, S k, S v) { c.assess.bm25_m = parse_real(k, v); }, [](const C& c) { return d(c.assess.bm25_m); }}},
        {"assess.bm25_b", {[](C& c, S k, S v) { c.assess.bm25_b = parse_real(k, v); }, [](const C& c) { return d(c.assess.bm25_b); }}},
        {"assess.query", {[](C& c, S, S v) { c.query = v; }, [](const C& c) { return c.query; }}},
        {"extend.conflict",
         {[](C& c, S k, S v) {
              try {
                  c.conflict = extend::parse_conflict_policy(v);
              } catch (const Error& e) {
                  throw ConfigError(k + ": " + e.what());
              }
          },
          [](const C& c) { return std::string(c.conflict == extend::ConflictPolicy::Rename ? "rename" : "strict"); }}},
        {"extend.flatten", {[](C& c, S k, S v) { c.flatten = parse_bool(k, v); }, [](const C& c) { return b(c.flatten); }}},
        {"extend.keep_unaligned_etypes",
         {[](C& c, S k, S v) { c.keep_unaligned_etypes = parse_bool(k, v); },
          [](const C& c) { return b(c.keep_unaligned_etypes); }}},
        {"run.seed",
         {[](C& c, S k, S v) {
              c.seed = static_cast<std::uint64_t>(parse_integer(k, v, 0));
              c.train.seed = c.seed;
          },
          [](const C& c) { return std::to_string(c.seed); }}},
        {"run.threads",
         {[](C& c, S k, S v) { c.threads = static_cast<unsigned>(parse_integer(k, v, 1)); },
          [](const C& c) { return std::to_string(c.threads); }}},
    };
    return t;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = table().find(key);
    if (it == table().end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second.set(*this, key, value);
}

std::map<std::string, std::string> RunConfig::dump() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : table()) out[k] = v.get(*this);
    return out;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, v] : table()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_text(RunConfig& cfg, std::string_view contents, const std::string& source) {
    auto ls = text::lines(contents);
    std::string section;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        std::string line = ls[i];
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto t = std::string(text::trim(line));
        if (t.empty()) continue;
        auto where = source + ":" + std::to_string(i + 1) + ": ";
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) throw ConfigError(where + "malformed section header");
            section = std::string(text::trim(std::string_view(t).substr(1, t.size() - 2)));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        auto key = std::string(text::trim(std::string_view(t).substr(0, eq)));
        auto value = std::string(text::trim(std::string_view(t).substr(eq + 1)));
        if (key.empty()) throw ConfigError(where + "empty key");
        if (!section.empty()) key = section + "." + key;
        try {
            cfg.set(key, value);
        } catch (const ConfigError& e) {
            std::string msg = e.what();
            throw ConfigError(where + msg.substr(e.kind().size() + 2));
        }
    }
}

RunConfig load(const std::filesystem::path& path) {
    RunConfig cfg;
    apply_text(cfg, text::read_file(path), path.string());
    // Input paths in a config file are relative to the file itself.
    auto base = path.parent_path();
    for (auto* p : {&cfg.ref, &cfg.cand, &cfg.stopwords, &cfg.embeddings, &cfg.taxonomy}) {
        if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
    }
    return cfg;
}

std::string write(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.dump()) out += k + " = " + v + "\n";
    return out;
}

}  // namespace kgext::config
