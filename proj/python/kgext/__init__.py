"""Entity type recognition and knowledge graph extension (C++ core)."""

from ._kgext import (
    Graph,
    KgextError,
    assess,
    balance,
    cmm,
    cue_e,
    cue_er,
    dem,
    extend,
    f_beta,
    formal_context_csv,
    lcs_sim,
    levenshtein_sim,
    load_graph,
    match_properties,
    needleman_wunsch_sim,
    ngram_dice,
    parse_rdf,
    predict_score,
    read_graph_json,
    similarity,
    substring_sim,
    train_model,
)

__version__ = "0.1.0"
