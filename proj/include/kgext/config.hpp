#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgext/assess.hpp"
#include "kgext/extend.hpp"
#include "kgext/propsim.hpp"
#include "kgext/recognizer.hpp"

namespace kgext::config {

/// Every tunable of a pipeline run. Defaults equal the library defaults.
struct RunConfig {
    // paths
    std::string ref;
    std::string cand;
    std::string stopwords;
    std::string embeddings;
    std::string taxonomy;
    std::string out = ".";

    bool lenient = false;

    propsim::Params propsim;

    double tau = 0.8;
    double ps_threshold = 0.3;
    bool many_to_many = false;

    double cutoff = 0.5;
    bool one_to_one = false;
    recognizer::TrainParams train;
    double balance_ratio = 0.1;
    bool balance = true;

    assess::AssessParams assess;
    std::string query;

    extend::ConflictPolicy conflict = extend::ConflictPolicy::Rename;
    bool flatten = false;
    bool keep_unaligned_etypes = false;

    std::uint64_t seed = 0;
    unsigned threads = 1;

    /// Sets one dotted key. Throws ConfigError naming the key.
    void set(const std::string& key, const std::string& value);

    /// All keys with their current values, in key order.
    std::map<std::string, std::string> dump() const;
};

/// All accepted keys.
const std::vector<std::string>& known_keys();

/// `key = value` lines; `#` starts a comment; `[section]` prefixes the
/// following keys with `section.`. Unknown keys throw ConfigError.
void apply_text(RunConfig& cfg, std::string_view text, const std::string& source = "<config>");
/// Relative input paths (ref, cand, stopwords, embeddings, taxonomy) resolve
/// against the directory of the file; `paths.out` stays relative to the caller.
RunConfig load(const std::filesystem::path& path);

/// Serialized form accepted by apply_text.
std::string write(const RunConfig& cfg);

}  // namespace kgext::config
