// kgext command line: one subcommand per pipeline stage.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kgext/alignment.hpp"
#include "kgext/assess.hpp"
#include "kgext/config.hpp"
#include "kgext/errors.hpp"
#include "kgext/extend.hpp"
#include "kgext/fca.hpp"
#include "kgext/ingest.hpp"
#include "kgext/matcher.hpp"
#include "kgext/pipeline.hpp"
#include "kgext/propsim.hpp"
#include "kgext/recognizer.hpp"
#include "kgext/text.hpp"

namespace fs = std::filesystem;
using namespace kgext;

namespace {

struct Globals {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::string stopwords;
    // Subcommand flags that map onto config keys, applied last.
    std::vector<std::pair<std::string, std::string>> overrides;
};

void override_key(Globals& g, const std::string& key, const std::string& value) { g.overrides.emplace_back(key, value); }

config::RunConfig resolve(const Globals& g) {
    config::RunConfig cfg;
    if (!g.config_path.empty()) cfg = config::load(g.config_path);
    for (const auto& s : g.sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        cfg.set(std::string(text::trim(s.substr(0, eq))), std::string(text::trim(s.substr(eq + 1))));
    }
    if (!g.stopwords.empty()) cfg.stopwords = g.stopwords;
    if (g.threads) cfg.set("run.threads", std::to_string(*g.threads));
    if (g.seed) cfg.set("run.seed", std::to_string(*g.seed));
    for (const auto& [k, v] : g.overrides) cfg.set(k, v);
    return cfg;
}

/// Prefixes errors raised while reading `path` with the path.
template <typename F>
auto with_source(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), path + ": " + std::string(e.what()).substr(12));
    } catch (const Error& e) {
        std::string msg = e.what();
        throw Error(e.kind(), path + ": " + msg.substr(e.kind().size() + 2));
    }
}

std::string read_input(const std::string& path) {
    if (path.empty()) throw ConfigError("missing input path");
    return text::read_file(path);
}

pipeline::Resources load_resources(const config::RunConfig& cfg) {
    pipeline::Resources r;
    if (!cfg.stopwords.empty()) {
        r.stopwords = with_source(cfg.stopwords, [&] { return ingest::StopwordList::load(cfg.stopwords); });
    }
    if (!cfg.embeddings.empty()) {
        r.embeddings = with_source(cfg.embeddings, [&] { return lexsim::EmbeddingStore::load(cfg.embeddings); });
    }
    if (!cfg.taxonomy.empty()) {
        r.taxonomy = with_source(cfg.taxonomy, [&] { return lexsim::TaxonomyStore::load(cfg.taxonomy); });
    }
    return r;
}

KnowledgeGraph load_graph(const std::string& path, const pipeline::Resources& res, const char* what) {
    if (path.empty()) throw ConfigError(std::string("no ") + what + " graph given (flag or paths key)");
    return with_source(path, [&] { return ingest::load_graph(path, res.stopwords); });
}

std::vector<Alignment> load_alignments(const std::string& path) {
    auto contents = read_input(path);
    return with_source(path, [&] { return parse_alignment_tsv(contents); });
}

std::vector<CandidatePair> load_pairs(const std::string& path) {
    auto contents = read_input(path);
    return with_source(path, [&] { return parse_pairs_csv(contents); });
}

recognizer::TrainedModel load_model(const std::string& path) {
    auto contents = read_input(path);
    return with_source(path, [&] { return recognizer::parse_model(contents); });
}

void emit(const std::string& out, const std::string& contents) {
    if (out.empty() || out == "-") {
        std::cout << contents;
        return;
    }
    auto parent = fs::path(out).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    text::write_file(out, contents);
}

AlignedPropertyPairs property_alignments(const std::string& path, const KnowledgeGraph& a, const KnowledgeGraph& b,
                                         const config::RunConfig& cfg, const pipeline::Resources& res) {
    if (!path.empty()) return load_alignments(path);
    matcher::MatchParams mp;
    mp.tau = cfg.tau;
    mp.many_to_many = cfg.many_to_many;
    mp.embeddings = res.embeddings ? &*res.embeddings : nullptr;
    mp.threads = cfg.threads;
    return matcher::match_properties(a, b, mp);
}

pipeline::PairOptions pair_options(PairKind kind, const config::RunConfig& cfg, bool no_prune) {
    pipeline::PairOptions po;
    po.kind = kind;
    if (no_prune) {
        po.ps_threshold.reset();
        po.prune_instance = false;
    } else {
        po.ps_threshold = cfg.ps_threshold;
    }
    return po;
}

std::string format_eval(const recognizer::EvalReport& r) {
    nlohmann::ordered_json j;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    j["tn"] = r.tn;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f_05"] = r.f_05;
    j["f_1"] = r.f_1;
    j["f_2"] = r.f_2;
    return j.dump(2) + "\n";
}


// ---------------------------------------------------------------------------
// report: classify and summarize artifacts

nlohmann::ordered_json summarize(const std::string& path) {
    auto contents = text::read_file(path);
    nlohmann::ordered_json a;
    a["path"] = path;
    a["fnv1a64"] = text::fnv1a64_hex(contents);
    nlohmann::ordered_json s;
    std::string type = "unknown";
    if (contents.rfind("kgext-model", 0) == 0) {
        auto m = recognizer::parse_model(contents);
        type = "model";
        s["kind"] = recognizer::model_kind_name(m.kind);
        s["features"] = recognizer::feature_kind_name(m.features);
        s["trees"] = m.trees.size();
    } else if (contents.rfind("# kgext simtable", 0) == 0) {
        auto t = propsim::parse_simtable_csv(contents);
        type = "simtable";
        s["variant"] = t.normalized() ? "normalized" : "raw";
        s["rows"] = t.rows().size();
    } else if (contents.rfind("left,right,kind", 0) == 0) {
        type = "pairs";
        s["pairs"] = parse_pairs_csv(contents).size();
    } else if (contents.rfind("kind,concept", 0) == 0) {
        auto f = fca::import_context(contents, path);
        type = "context";
        s["rows"] = f.concepts().size();
        s["columns"] = f.properties().size();
    } else if (!contents.empty() && (contents.front() == '{' || contents.front() == '[')) {
        auto j = nlohmann::json::parse(contents);
        if (j.contains("counts") && j.contains("merged")) {
            type = "extension-report";
            for (const char* k : {"reference", "candidate", "etypes_added", "properties_added", "entities_merged",
                                  "entities_discarded"}) {
                s[k] = j.contains(k) ? j[k] : j["counts"][k];
            }
        } else if (j.contains("graphs") && j.contains("etypes")) {
            type = "assessment";
            s["graphs"] = j["graphs"].size();
            s["etypes"] = j["etypes"].size();
        } else if (j.contains("f_1") && j.contains("precision")) {
            type = "evaluation";
            for (const char* k : {"precision", "recall", "f_1"}) s[k] = j[k];
        } else if (j.contains("etypes") && j.contains("entities")) {
            auto g = ingest::read_graph_json(contents);
            type = "graph";
            s["name"] = g.name();
            s["etypes"] = g.etypes().size();
            s["properties"] = g.properties().size();
            s["entities"] = g.entities().size();
            s["max_depth"] = g.max_depth();
        }
    } else {
        try {
            auto al = parse_alignment_tsv(contents);
            type = "alignments";
            s["alignments"] = al.size();
        } catch (const Error&) {
        }
    }
    a["type"] = type;
    a["summary"] = s;
    return a;
}

std::string markdown(const nlohmann::ordered_json& report) {
    std::string md = "# kgext run report\n\n| artifact | type | fnv1a64 | summary |\n|---|---|---|---|\n";
    for (const auto& a : report["artifacts"]) {
        std::string sum;
        for (auto it = a["summary"].begin(); it != a["summary"].end(); ++it) {
            if (!sum.empty()) sum += ", ";
            sum += it.key() + "=" + (it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
        }
        md += "| " + a["path"].get<std::string>() + " | " + a["type"].get<std::string>() + " | " +
              a["fnv1a64"].get<std::string>() + " | " + sum + " |\n";
    }
    return md;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kgext: entity type recognition and knowledge graph extension"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "kgext 0.1.0");

    Globals g;
    app.add_option("--config", g.config_path, "Run configuration file (key = value, [section] headers)")
        ->check(CLI::ExistingFile);
    app.add_option("--set", g.sets, "Override one configuration key, e.g. --set propsim.lambda=0.7 (repeatable)");
    app.add_option("--threads", g.threads, "Worker threads for pair scoring; results do not depend on it")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed for every random choice (balancing, training)");
    app.add_option("--stopwords", g.stopwords, "Stop-word list, one token per line (default: built-in list)");

    // Values shared by several subcommands.
    std::string ref, cand, props, pairs_path, out, model_path, gold, sims_path;
    std::string kind = "schema";
    bool no_prune = false;

    auto graph_pair = [&](CLI::App* sub) {
        sub->add_option("--ref", ref, "Reference graph (KG interchange JSON, .nt or .ttl); default paths.ref");
        sub->add_option("--cand", cand, "Candidate graph; default paths.cand");
    };
    auto kind_option = [&](CLI::App* sub) {
        sub->add_option("--kind", kind, "Pair kind: schema (etype-etype) or instance (etype-entity)")
            ->check(CLI::IsMember({"schema", "instance", "etype-etype", "etype-entity"}));
    };
    auto lex_options = [&](CLI::App* sub) {
        sub->add_option_function<std::string>(
            "--embeddings", [&](const std::string& v) { override_key(g, "paths.embeddings", v); },
            "Word vectors: header `count dim`, then `token v1 .. vdim` per line");
        sub->add_option_function<std::string>(
            "--taxonomy", [&](const std::string& v) { override_key(g, "paths.taxonomy", v); },
            "Taxonomy for Wu-Palmer: `child<TAB>parent` per line, `-` as parent marks a root");
    };
    auto sim_options = [&](CLI::App* sub) {
        sub->add_option_function<std::string>(
            "--lambda", [&](const std::string& v) { override_key(g, "propsim.lambda", v); },
            "Horizontal specificity decay (default 0.5)");
        sub->add_option_function<std::string>(
            "--theta", [&](const std::string& v) { override_key(g, "propsim.theta", v); },
            "Vertical specificity step: auto (1/max depth) or a number");
        sub->add_option_function<std::string>(
            "--entropy", [&](const std::string& v) { override_key(g, "propsim.entropy", v); },
            "Entropy weights for informational specificity: schema or instance");
    };
    auto tau_option = [&](CLI::App* sub) {
        sub->add_option_function<std::string>(
            "--tau", [&](const std::string& v) { override_key(g, "matcher.tau", v); },
            "Property alignment threshold when --props is not given (default 0.8)");
    };
    auto ps_options = [&](CLI::App* sub) {
        sub->add_option_function<std::string>(
            "--ps-threshold", [&](const std::string& v) { override_key(g, "matcher.ps_threshold", v); },
            "Schema pair pre-selection threshold on PS_s (default 0.3)");
        sub->add_flag("--no-prune", no_prune, "Keep the full cross product of candidate pairs");
    };

    // ingest
    auto* c_ingest = app.add_subcommand("ingest", "Convert RDF (N-Triples, Turtle subset) or JSON into the KG interchange file");
    std::string input, format = "auto", name;
    c_ingest->add_option("input", input, "Input file")->required();
    c_ingest->add_option("--format", format, "Input format: auto (by extension), nt, ttl or json")
        ->check(CLI::IsMember({"auto", "nt", "ttl", "json"}));
    c_ingest->add_option("--name", name, "Graph name (default: input file stem)");
    c_ingest->add_flag_function(
        "--lenient", [&](std::int64_t) { override_key(g, "ingest.lenient", "true"); },
        "Skip malformed statements with a warning instead of failing");
    c_ingest->add_option("-o,--out", out, "Output KG interchange JSON (default stdout)");

    // formalize
    auto* c_formalize = app.add_subcommand("formalize", "Write the three-valued formal context of a graph as CSV");
    std::string graph_path, scope = "both";
    c_formalize->add_option("graph", graph_path, "KG interchange file")->required();
    c_formalize->add_option("--scope", scope, "Rows to include: schema, instance or both")
        ->check(CLI::IsMember({"schema", "instance", "both"}));
    c_formalize->add_option("-o,--out", out, "Output CSV (default stdout)");

    // match-props
    auto* c_match = app.add_subcommand("match-props", "Align properties of two graphs; writes alignment TSV");
    graph_pair(c_match);
    tau_option(c_match);
    c_match->add_flag_function(
        "--many-to-many", [&](std::int64_t) { override_key(g, "matcher.many_to_many", "true"); },
        "Keep every pair above tau instead of greedy 1:1 selection");
    c_match->add_option("--model", model_path, "Property-kind model; replaces the threshold rule");
    c_match->add_option_function<std::string>(
        "--cutoff", [&](const std::string& v) { override_key(g, "recognizer.cutoff", v); },
        "Score cutoff for --model (default 0.5)");
    lex_options(c_match);
    c_match->add_option("-o,--out", out, "Output alignment TSV (default stdout)");

    // pairs
    auto* c_pairs = app.add_subcommand("pairs", "Generate and prune candidate pairs; writes pairs CSV");
    graph_pair(c_pairs);
    kind_option(c_pairs);
    c_pairs->add_option("--props", props, "Property alignment TSV (default: computed with --tau)");
    tau_option(c_pairs);
    ps_options(c_pairs);
    lex_options(c_pairs);
    std::string dropped_out;
    c_pairs->add_option("--dropped", dropped_out, "Also write the pruned pairs to this CSV");
    c_pairs->add_option("-o,--out", out, "Output pairs CSV (default stdout)");

    // simtable
    auto* c_sim = app.add_subcommand("simtable", "Property-based similarity (Sim_H, Sim_V, Sim_I) for candidate pairs");
    graph_pair(c_sim);
    kind_option(c_sim);
    c_sim->add_option("--props", props, "Property alignment TSV (default: computed with --tau)");
    c_sim->add_option("--pairs", pairs_path, "Pairs CSV (default: generated and pruned like `pairs`)");
    std::string variant = "normalized";
    c_sim->add_option("--variant", variant, "Values to write: raw or normalized (z-score then min-max per batch)")
        ->check(CLI::IsMember({"raw", "normalized"}));
    tau_option(c_sim);
    ps_options(c_sim);
    sim_options(c_sim);
    lex_options(c_sim);
    c_sim->add_option("-o,--out", out, "Output similarity CSV (default stdout)");

    // train
    auto* c_train = app.add_subcommand("train", "Train a recognizer from a graph pair and a gold alignment, or from a feature CSV");
    graph_pair(c_train);
    kind_option(c_train);
    c_train->add_option("--gold", gold, "Gold alignment TSV labelling the candidate pairs");
    c_train->add_option("--props", props, "Property alignment TSV (default: computed with --tau)");
    std::string features_in, features_out;
    c_train->add_option("--features", features_in, "Labelled feature CSV to train on instead of a graph pair");
    c_train->add_option("--features-out", features_out, "Write the labelled training rows here");
    c_train->add_flag("--property-model", [&](std::int64_t) { kind = "property"; },
                      "Train a property matcher (property feature layout) from --gold property alignments");
    c_train->add_option_function<std::string>(
        "--model-kind", [&](const std::string& v) { override_key(g, "recognizer.model", v); },
        "Classifier: logreg, tree or gbt");
    c_train->add_option_function<std::string>(
        "--balance-ratio", [&](const std::string& v) { override_key(g, "balance.ratio", v); },
        "Oversample positives up to this positive/negative ratio (default 0.1)");
    c_train->add_flag_function(
        "--no-balance", [&](std::int64_t) { override_key(g, "balance.enabled", "false"); },
        "Train on the rows as they are");
    tau_option(c_train);
    ps_options(c_train);
    sim_options(c_train);
    lex_options(c_train);
    c_train->add_option("-o,--out", out, "Output model file (default stdout)");

    // recognize
    auto* c_rec = app.add_subcommand("recognize", "Score candidate pairs with a trained model; writes alignment TSV");
    graph_pair(c_rec);
    c_rec->add_option("--model", model_path, "Model file from `train`")->required();
    c_rec->add_option("--props", props, "Property alignment TSV (default: computed with --tau)");
    c_rec->add_option("--pairs", pairs_path, "Pairs CSV (default: generated and pruned like `pairs`)");
    c_rec->add_option("--simtable", sims_path, "Similarity CSV from `simtable` (raw tables are normalized first)");
    c_rec->add_option_function<std::string>(
        "--cutoff", [&](const std::string& v) { override_key(g, "recognizer.cutoff", v); },
        "Accept pairs scoring at least this (default 0.5)");
    c_rec->add_flag_function(
        "--one-to-one", [&](std::int64_t) { override_key(g, "recognizer.one_to_one", "true"); },
        "Greedy 1:1 selection of accepted schema pairs");
    std::string eval_out;
    c_rec->add_option("--gold", gold, "Gold alignment TSV to evaluate against");
    c_rec->add_option("--eval-out", eval_out, "Write precision/recall/F-scores as JSON (needs --gold; default stderr)");
    c_rec->add_option("--features-out", features_out, "Write the feature rows here");
    tau_option(c_rec);
    ps_options(c_rec);
    sim_options(c_rec);
    lex_options(c_rec);
    c_rec->add_option("-o,--out", out, "Output alignment TSV (default stdout)");

    // extend
    auto* c_ext = app.add_subcommand("extend", "Merge the candidate graph into the reference graph");
    graph_pair(c_ext);
    std::string em_ali, report_json, report_csv;
    c_ext->add_option("--alignments", em_ali, "Entity type alignment TSV (reference left, candidate right)")->required();
    c_ext->add_option("--props", props, "Property alignment TSV (default: computed with --tau)");
    c_ext->add_option("--model", model_path, "Instance model placing leftover entities (default: discard them)");
    c_ext->add_option_function<std::string>(
        "--cutoff", [&](const std::string& v) { override_key(g, "recognizer.cutoff", v); },
        "Instance acceptance cutoff (default 0.5)");
    c_ext->add_option_function<std::string>(
        "--conflict", [&](const std::string& v) { override_key(g, "extend.conflict", v); },
        "Id clashes with different labels: rename (suffix @<candidate>) or strict (fail)");
    c_ext->add_flag_function(
        "--flatten", [&](std::int64_t) { override_key(g, "extend.flatten", "true"); },
        "Fold unaligned subclasses into the aligned type");
    c_ext->add_flag_function(
        "--keep-unaligned-etypes", [&](std::int64_t) { override_key(g, "extend.keep_unaligned_etypes", "true"); },
        "Keep candidate entity types that received no entities");
    c_ext->add_option("--report-json", report_json, "Extension report as JSON");
    c_ext->add_option("--report-csv", report_csv, "Before/after assessment of aligned types as CSV");
    tau_option(c_ext);
    sim_options(c_ext);
    c_ext->add_option("-o,--out", out, "Output KG_ext interchange JSON (default stdout)");

    // assess
    auto* c_assess = app.add_subcommand("assess", "Cue validity, Focus, balance and query rankings over a corpus of graphs");
    std::vector<std::string> graphs;
    std::string csv_out, lotus_out, lotus_etypes;
    c_assess->add_option("graphs", graphs, "KG interchange files")->required();
    c_assess->add_option_function<std::string>(
        "--query", [&](const std::string& v) { override_key(g, "assess.query", v); },
        "Comma-separated query terms for CMM, DEM, TF-IDF and BM25");
    for (const char* k : {"eta", "mu", "alpha", "beta", "dem_w", "bm25_m", "bm25_b"}) {
        std::string key = std::string("assess.") + k;
        std::string flag = std::string("--") + k;
        std::replace(flag.begin(), flag.end(), '_', '-');
        c_assess->add_option_function<std::string>(
            flag, [&g, key](const std::string& v) { override_key(g, key, v); }, "Sets " + key);
    }
    c_assess->add_option("--csv", csv_out, "Also write the report as CSV");
    c_assess->add_option("--lotus", lotus_out, "Write the knowledge lotus of the graphs' property sets as CSV");
    c_assess->add_option("-o,--out", out, "Output report JSON (default stdout)");

    // report
    auto* c_report = app.add_subcommand("report", "Summarize run artifacts into one JSON and Markdown report");
    std::vector<std::string> artifacts;
    std::string md_out;
    c_report->add_option("artifacts", artifacts, "Artifact files or directories (searched recursively)")->required();
    c_report->add_option("--markdown", md_out, "Markdown summary path");
    c_report->add_option("-o,--out", out, "Output JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        auto cfg = resolve(g);
        auto res = load_resources(cfg);
        if (ref.empty()) ref = cfg.ref;
        if (cand.empty()) cand = cfg.cand;
        auto pkind = kind == "property" ? PairKind::EtypeEtype : parse_pair_kind(kind);

        if (*c_ingest) {
            if (format == "auto") {
                auto ext = fs::path(input).extension().string();
                format = ext == ".nt" ? "nt" : ext == ".ttl" ? "ttl" : "json";
            }
            KnowledgeGraph graph;
            if (format == "json") {
                graph = load_graph(input, res, "input");
            } else {
                auto contents = read_input(input);
                ingest::ParseOptions po{cfg.lenient};
                std::vector<std::string> warnings;
                auto triples = with_source(input, [&] {
                    return format == "nt" ? ingest::parse_ntriples(contents, po, &warnings)
                                          : ingest::parse_turtle_subset(contents, po, &warnings);
                });
                auto rec = ingest::flatten(triples, ingest::FlattenConfig::defaults(),
                                           name.empty() ? fs::path(input).stem().string() : name);
                graph = build_graph(rec, res.stopwords);
                for (const auto& w : warnings) std::cerr << "kgext: warning: " << input << ": " << w << "\n";
            }
            if (!name.empty() && format == "json") {
                auto rec = graph.to_records();
                rec.name = name;
                graph = build_graph(rec, res.stopwords);
            }
            emit(out, ingest::write_graph_json(graph));
        } else if (*c_formalize) {
            auto graph = load_graph(graph_path, res, "input");
            emit(out, fca::export_context(fca::formalize(graph, fca::parse_scope(scope))));
        } else if (*c_match) {
            auto a = load_graph(ref, res, "reference");
            auto b = load_graph(cand, res, "candidate");
            AlignedPropertyPairs pm;
            if (!model_path.empty()) {
                pm = recognizer::match_properties_model(a, b, load_model(model_path), cfg.cutoff, res.lex());
            } else {
                pm = property_alignments("", a, b, cfg, res);
            }
            emit(out, write_alignment_tsv(pm));
        } else if (*c_pairs) {
            auto a = load_graph(ref, res, "reference");
            auto b = load_graph(cand, res, "candidate");
            auto pm = property_alignments(props, a, b, cfg, res);
            auto ps = pipeline::candidate_pairs(a, b, pm, pair_options(pkind, cfg, no_prune), res);
            if (!dropped_out.empty()) emit(dropped_out, write_pairs_csv(ps.dropped));
            emit(out, write_pairs_csv(ps.kept));
        } else if (*c_sim) {
            auto a = load_graph(ref, res, "reference");
            auto b = load_graph(cand, res, "candidate");
            auto pm = property_alignments(props, a, b, cfg, res);
            auto pairs = pairs_path.empty()
                             ? pipeline::candidate_pairs(a, b, pm, pair_options(pkind, cfg, no_prune), res).kept
                             : load_pairs(pairs_path);
            auto sims = pipeline::similarity(a, b, pairs, pm, cfg.propsim, cfg.threads);
            emit(out, propsim::write_simtable_csv(variant == "raw" ? sims.raw : sims.normalized));
        } else if (*c_train) {
            std::vector<recognizer::LabeledPair> rows;
            recognizer::FeatureKind fk = kind == "property"             ? recognizer::FeatureKind::Property
                                         : pkind == PairKind::EtypeEntity ? recognizer::FeatureKind::Instance
                                                                          : recognizer::FeatureKind::Schema;
            if (!features_in.empty()) {
                auto contents = read_input(features_in);
                rows = with_source(features_in, [&] { return recognizer::parse_feature_csv(contents, fk); });
            } else {
                if (gold.empty()) throw ConfigError("train needs --gold or --features");
                auto a = load_graph(ref, res, "reference");
                auto b = load_graph(cand, res, "candidate");
                auto gold_al = load_alignments(gold);
                if (fk == recognizer::FeatureKind::Property) {
                    rows = recognizer::property_training_rows(a, b, gold_al, res.lex());
                } else {
                    auto pm = property_alignments(props, a, b, cfg, res);
                    pipeline::RecognizeOptions ro;
                    ro.pairs = pair_options(pkind, cfg, no_prune);
                    ro.sim = cfg.propsim;
                    ro.threads = cfg.threads;
                    rows = pipeline::training_rows(a, b, pm, gold_al, ro, res);
                }
            }
            if (!features_out.empty()) emit(features_out, recognizer::write_feature_csv(rows, fk, true));
            if (cfg.balance) rows = recognizer::balance(rows, cfg.balance_ratio, cfg.seed);
            auto tp = cfg.train;
            tp.seed = cfg.seed;
            emit(out, recognizer::write_model(recognizer::train(rows, tp)));
        } else if (*c_rec) {
            auto a = load_graph(ref, res, "reference");
            auto b = load_graph(cand, res, "candidate");
            auto model = load_model(model_path);
            auto pm = property_alignments(props, a, b, cfg, res);
            auto mkind = model.features == recognizer::FeatureKind::Instance ? PairKind::EtypeEntity
                                                                              : PairKind::EtypeEtype;
            auto pairs = pairs_path.empty()
                             ? pipeline::candidate_pairs(a, b, pm, pair_options(mkind, cfg, no_prune), res).kept
                             : load_pairs(pairs_path);
            pipeline::SimBatch sims;
            if (!sims_path.empty()) {
                auto contents = read_input(sims_path);
                auto t = with_source(sims_path, [&] { return propsim::parse_simtable_csv(contents); });
                sims.normalized = t.normalized() ? t : propsim::SimTable(propsim::normalize_batch(t.rows()), true);
            } else {
                sims = pipeline::similarity(a, b, pairs, pm, cfg.propsim, cfg.threads);
            }
            auto rows = pipeline::features(a, b, pairs, sims, res, cfg.threads);
            std::vector<recognizer::FeatureVector> fvs;
            for (const auto& r : rows) fvs.push_back(r.features);
            auto found = recognizer::recognize(model, pairs, fvs, cfg.cutoff, cfg.one_to_one);
            if (!features_out.empty()) emit(features_out, recognizer::write_feature_csv(rows, model.features, false));
            if (!gold.empty()) {
                auto ev = format_eval(recognizer::evaluate_alignments(found, load_alignments(gold)));
                if (eval_out.empty()) {
                    std::cerr << ev;
                } else {
                    emit(eval_out, ev);
                }
            }
            emit(out, write_alignment_tsv(found));
        } else if (*c_ext) {
            auto a = load_graph(ref, res, "reference");
            auto b = load_graph(cand, res, "candidate");
            extend::ExtensionPlan plan;
            plan.em_ali = load_alignments(em_ali);
            if (!props.empty()) plan.property_alignments = load_alignments(props);
            plan.tau = cfg.tau;
            std::optional<recognizer::TrainedModel> model;
            if (!model_path.empty()) {
                model = load_model(model_path);
                plan.model = &*model;
            }
            plan.cutoff = cfg.cutoff;
            plan.conflict = cfg.conflict;
            plan.flatten = cfg.flatten;
            plan.keep_unaligned_etypes = cfg.keep_unaligned_etypes;
            plan.sim_params = cfg.propsim;
            plan.threads = cfg.threads;
            auto result = extend::extend(a, b, plan);
            std::vector<EntityTypeId> aligned;
            for (const auto& al : plan.em_ali) aligned.push_back(al.left);
            std::sort(aligned.begin(), aligned.end());
            aligned.erase(std::unique(aligned.begin(), aligned.end()), aligned.end());
            result.report.comparison = extend::compare_assessment(a, result.graph, aligned, {}, cfg.assess);
            if (!report_json.empty()) emit(report_json, extend::write_report_json(result.report));
            if (!report_csv.empty()) emit(report_csv, extend::write_report_csv(result.report));
            emit(out, ingest::write_graph_json(result.graph));
        } else if (*c_assess) {
            std::vector<KnowledgeGraph> loaded;
            for (const auto& p : graphs) loaded.push_back(load_graph(p, res, "input"));
            std::vector<const KnowledgeGraph*> corpus;
            for (const auto& gr : loaded) corpus.push_back(&gr);
            auto q = assess::parse_query(cfg.query, res.stopwords);
            auto report = assess::assess_corpus(corpus, q, cfg.assess, res.stopwords);
            if (!csv_out.empty()) emit(csv_out, assess::write_report_csv(report));
            if (!lotus_out.empty()) {
                std::vector<std::pair<std::string, std::set<std::string>>> sets;
                for (const auto& gr : loaded) {
                    std::set<std::string> ps;
                    for (const auto& [id, p] : gr.properties()) ps.insert(text::join(p.normalized_label, " "));
                    sets.emplace_back(gr.name(), std::move(ps));
                }
                emit(lotus_out, assess::write_lotus_csv(assess::lotus_stats(sets)));
            }
            emit(out, assess::write_report_json(report));
        } else if (*c_report) {
            std::vector<std::string> files;
            for (const auto& p : artifacts) {
                if (fs::is_directory(p)) {
                    for (const auto& e : fs::recursive_directory_iterator(p)) {
                        if (e.is_regular_file()) files.push_back(e.path().string());
                    }
                } else {
                    files.push_back(p);
                }
            }
            std::sort(files.begin(), files.end());
            nlohmann::ordered_json report;
            report["config"] = cfg.dump();
            report["artifacts"] = nlohmann::ordered_json::array();
            for (const auto& f : files) {
                if ((!out.empty() && fs::path(f) == fs::path(out)) || (!md_out.empty() && fs::path(f) == fs::path(md_out))) {
                    continue;
                }
                report["artifacts"].push_back(with_source(f, [&] { return summarize(f); }));
            }
            if (!md_out.empty()) emit(md_out, markdown(report));
            emit(out, report.dump(2) + "\n");
        }
    } catch (const Error& e) {
        std::cerr << "kgext: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "kgext: internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
