#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "kgext/assess.hpp"
#include "kgext/errors.hpp"
#include "kgext/extend.hpp"
#include "kgext/fca.hpp"
#include "kgext/ingest.hpp"
#include "kgext/lexsim.hpp"
#include "kgext/matcher.hpp"
#include "kgext/pipeline.hpp"
#include "kgext/recognizer.hpp"

namespace py = pybind11;
using namespace kgext;

namespace {

using AlignmentTuple = std::tuple<std::string, std::string, double>;

std::vector<AlignmentTuple> to_tuples(const std::vector<Alignment>& al) {
    std::vector<AlignmentTuple> out;
    for (const auto& a : al) out.emplace_back(a.left, a.right, a.confidence);
    return out;
}

std::vector<Alignment> from_tuples(const std::vector<AlignmentTuple>& t, Relation rel) {
    std::vector<Alignment> out;
    for (const auto& [l, r, c] : t) out.push_back({l, r, rel, c});
    return out;
}

KnowledgeGraph parse_rdf(const std::string& text, const std::string& format, const std::string& name) {
    auto triples = format == "ttl" ? ingest::parse_turtle_subset(text) : ingest::parse_ntriples(text);
    return build_graph(ingest::flatten(triples, ingest::FlattenConfig::defaults(), name));
}

std::vector<std::string> as_list(const std::set<std::string>& s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_kgext, m) {
    m.doc() = "Entity type recognition and knowledge graph extension";

    py::register_exception<Error>(m, "KgextError", PyExc_RuntimeError);

    py::class_<KnowledgeGraph>(m, "Graph")
        .def_property_readonly("name", &KnowledgeGraph::name)
        .def_property_readonly("etypes",
                               [](const KnowledgeGraph& g) {
                                   std::vector<std::string> out;
                                   for (const auto& [id, _] : g.etypes()) out.push_back(id);
                                   return out;
                               })
        .def_property_readonly("entities",
                               [](const KnowledgeGraph& g) {
                                   std::vector<std::string> out;
                                   for (const auto& [id, _] : g.entities()) out.push_back(id);
                                   return out;
                               })
        .def_property_readonly("properties",
                               [](const KnowledgeGraph& g) {
                                   std::vector<std::string> out;
                                   for (const auto& [id, _] : g.properties()) out.push_back(id);
                                   return out;
                               })
        .def_property_readonly("max_depth", &KnowledgeGraph::max_depth)
        .def("layer", [](const KnowledgeGraph& g, const std::string& e) { return g.etype(e).layer; })
        .def("label", [](const KnowledgeGraph& g, const std::string& e) { return g.etype(e).label; })
        .def("superclasses", [](const KnowledgeGraph& g, const std::string& e) { return as_list(g.etype(e).superclasses); })
        .def("entity_type",
             [](const KnowledgeGraph& g, const std::string& i) { return g.entity(i).etype; })
        .def("prop", [](const KnowledgeGraph& g, const std::string& e) { return as_list(g.prop(e)); })
        .def("ent_prop", [](const KnowledgeGraph& g, const std::string& i) { return as_list(g.ent_prop(i)); })
        .def("k_v", [](const KnowledgeGraph& g, const std::string& p) { return as_list(g.k_v(p)); })
        .def("to_json", &ingest::write_graph_json);

    m.def("load_graph", [](const std::string& path) { return ingest::load_graph(path); }, py::arg("path"),
          "Reads a KG interchange JSON file.");
    m.def("read_graph_json", [](const std::string& s) { return ingest::read_graph_json(s); }, py::arg("text"));
    m.def("parse_rdf", &parse_rdf, py::arg("text"), py::arg("format") = "nt", py::arg("name") = "",
          "N-Triples (`nt`) or Turtle subset (`ttl`) flattened into a graph.");
    m.def("formal_context_csv",
          [](const KnowledgeGraph& g, const std::string& scope) {
              return fca::export_context(fca::formalize(g, fca::parse_scope(scope)));
          },
          py::arg("graph"), py::arg("scope") = "both");

    m.def("ngram_dice", [](const std::string& a, const std::string& b, int n) { return lexsim::ngram_dice(a, b, n); },
          py::arg("a"), py::arg("b"), py::arg("n") = 2);
    m.def("lcs_sim", [](const std::string& a, const std::string& b) { return lexsim::lcs_sim(a, b); });
    m.def("levenshtein_sim", [](const std::string& a, const std::string& b) { return lexsim::levenshtein_sim(a, b); });
    m.def("substring_sim", [](const std::string& a, const std::string& b) { return lexsim::substring_sim(a, b); });
    m.def("needleman_wunsch_sim",
          [](const std::string& a, const std::string& b) { return lexsim::needleman_wunsch_sim(a, b); });

    m.def("match_properties",
          [](const KnowledgeGraph& a, const KnowledgeGraph& b, double tau, bool many_to_many) {
              matcher::MatchParams p;
              p.tau = tau;
              p.many_to_many = many_to_many;
              return to_tuples(matcher::match_properties(a, b, p));
          },
          py::arg("ref"), py::arg("cand"), py::arg("tau") = 0.8, py::arg("many_to_many") = false,
          "Property alignments as (ref_id, cand_id, confidence).");

    m.def("similarity",
          [](const KnowledgeGraph& a, const KnowledgeGraph& b, const std::vector<AlignmentTuple>& props,
             const std::string& kind, bool normalized) {
              pipeline::Resources res;
              auto pm = from_tuples(props, Relation::Equivalent);
              pipeline::PairOptions po;
              po.kind = parse_pair_kind(kind);
              po.ps_threshold.reset();
              po.prune_instance = false;
              auto pairs = pipeline::candidate_pairs(a, b, pm, po, res).kept;
              auto sims = pipeline::similarity(a, b, pairs, pm, {});
              std::vector<std::tuple<std::string, std::string, double, double, double>> out;
              for (const auto& r : (normalized ? sims.normalized : sims.raw).rows())
                  out.emplace_back(r.left, r.right, r.sim_h, r.sim_v, r.sim_i);
              return out;
          },
          py::arg("ref"), py::arg("cand"), py::arg("props"), py::arg("kind") = "schema", py::arg("normalized") = false,
          "(left, right, sim_h, sim_v, sim_i) over the unpruned cross product.");

    m.def("train_model",
          [](const std::string& feature_csv, const std::string& layout, const std::string& kind, std::uint64_t seed) {
              auto rows = recognizer::parse_feature_csv(feature_csv, recognizer::parse_feature_kind(layout));
              recognizer::TrainParams tp;
              tp.kind = recognizer::parse_model_kind(kind);
              tp.seed = seed;
              return recognizer::write_model(recognizer::train(rows, tp));
          },
          py::arg("feature_csv"), py::arg("layout") = "schema", py::arg("kind") = "logreg", py::arg("seed") = 0,
          "Trains on a labelled feature CSV and returns the model text.");
    m.def("predict_score",
          [](const std::string& model_text, const std::vector<double>& x) {
              return recognizer::predict_score(recognizer::parse_model(model_text), x);
          },
          py::arg("model"), py::arg("features"));
    m.def("f_beta", &recognizer::f_beta, py::arg("precision"), py::arg("recall"), py::arg("beta") = 1.0);

    m.def("cue_e", &assess::cue_e);
    m.def("cue_er", &assess::cue_er);
    m.def("balance", &assess::balance);
    m.def("cmm",
          [](const KnowledgeGraph& g, const std::string& q) { return assess::cmm(g, assess::parse_query(q)); });
    m.def("dem",
          [](const KnowledgeGraph& g, const std::string& q) { return assess::dem(g, assess::parse_query(q)); });
    m.def("assess",
          [](const std::vector<const KnowledgeGraph*>& graphs, const std::string& query) {
              return assess::write_report_json(assess::assess_corpus(graphs, assess::parse_query(query)));
          },
          py::arg("graphs"), py::arg("query") = "", "Assessment report as JSON text.");

    m.def("extend",
          [](const KnowledgeGraph& ref, const KnowledgeGraph& cand, const std::vector<AlignmentTuple>& etype_alignments,
             std::optional<std::string> model_text, const std::string& conflict, bool flatten) {
              extend::ExtensionPlan plan;
              plan.em_ali = from_tuples(etype_alignments, Relation::Equivalent);
              std::optional<recognizer::TrainedModel> model;
              if (model_text) {
                  model = recognizer::parse_model(*model_text);
                  plan.model = &*model;
              }
              plan.conflict = extend::parse_conflict_policy(conflict);
              plan.flatten = flatten;
              auto r = extend::extend(ref, cand, plan);
              return std::make_tuple(std::move(r.graph), extend::write_report_json(r.report));
          },
          py::arg("ref"), py::arg("cand"), py::arg("etype_alignments"), py::arg("model") = py::none(),
          py::arg("conflict") = "rename", py::arg("flatten") = false,
          "Returns (extended graph, report JSON). The reference graph is not modified.");
}
