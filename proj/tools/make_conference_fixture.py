#!/usr/bin/env python3
"""Regenerates tests/fixtures/conference: two conference-like graph pairs
(train and test) with gold entity type alignments, word vectors and a small
taxonomy. Output is deterministic for a given seed."""

import argparse
import json
import os
import random

# canonical label, synonym label, parent concept (or None), attributes
CONCEPTS = [
    ("Person", "Human", None, ["email", "phone", "gender"]),
    ("Author", "Writer", "Person", ["orcid", "h_index"]),
    ("Reviewer", "Referee", "Person", ["expertise", "review_load"]),
    ("Chair", "Chairman", "Person", ["chair_term"]),
    ("Participant", "Attendee", "Person", ["badge", "diet"]),
    ("Speaker", "Presenter", "Person", ["talk_slot", "bio"]),
    ("Student", "Pupil", "Person", ["student_id", "supervisor"]),
    ("Volunteer", "Helper", "Person", ["shift", "task"]),
    ("Paper", "Article", None, ["title", "page_count", "doi"]),
    ("Review", "Evaluation", None, ["score", "confidence", "comment"]),
    ("Abstract", "Summary", None, ["word_count", "text_body"]),
    ("Submission", "Entry", None, ["submitted_at", "track_ref"]),
    ("Proceedings", "Publication", None, ["isbn", "publisher"]),
    ("Poster", "Placard", None, ["board_number", "poster_size"]),
    ("Conference", "Symposium", None, ["acronym", "edition", "start_date"]),
    ("Workshop", "Seminar", "Conference", ["organizer_count"]),
    ("Session", "Meeting", None, ["room", "session_time"]),
    ("Tutorial", "Lesson", None, ["level", "duration"]),
    ("Banquet", "Dinner", None, ["menu", "seat_count"]),
    ("Track", "Stream", None, ["track_chair", "track_scope"]),
    ("Topic", "Subject", None, ["keyword_list", "area"]),
    ("Organization", "Institution", None, ["address", "country_code"]),
    ("Sponsor", "Funder", "Organization", ["sponsor_level", "amount"]),
    ("Committee", "Board", None, ["committee_size", "mandate"]),
    ("Registration", "Enrollment", None, ["registered_at", "ticket_type"]),
    ("Fee", "Charge", None, ["currency", "price"]),
    ("Invoice", "Bill", None, ["invoice_number", "due_amount"]),
    ("Deadline", "Cutoff", None, ["deadline_date", "timezone"]),
    ("Venue", "Location", None, ["capacity", "venue_city"]),
    ("Hotel", "Lodging", None, ["stars", "room_rate"]),
    ("Award", "Prize", None, ["award_year", "laureate"]),
    ("Decision", "Verdict", None, ["outcome", "decided_at"]),
    ("Journal", "Periodical", None, ["issn", "impact_factor"]),
    ("Keyword", "Term", None, ["term_weight"]),
    ("Program", "Schedule", None, ["program_version"]),
    ("Demo", "Demonstration", None, ["demo_url", "equipment"]),
]

GENERIC = ["name", "identifier", "description", "label", "created"]

# Broad taxonomy over label tokens; synonyms hang under their canonical word.
ROOTS = {
    "agent": ["person", "organization", "committee"],
    "artifact": ["paper", "review", "abstract", "submission", "proceedings", "poster", "journal", "keyword",
                 "invoice", "program", "demo", "award", "decision", "fee", "topic"],
    "happening": ["conference", "session", "tutorial", "banquet", "track", "registration", "deadline"],
    "place": ["venue", "hotel"],
}


def build_taxonomy():
    lines = ["entity\t-"]
    for root, kids in ROOTS.items():
        lines.append(f"{root}\tentity")
        for k in kids:
            lines.append(f"{k}\t{root}")
    for canon, syn, parent, _ in CONCEPTS:
        c, s = canon.lower(), syn.lower()
        if not any(c in kids for kids in ROOTS.values()):
            p = parent.lower() if parent else "artifact"
            lines.append(f"{c}\t{p}")
        lines.append(f"{s}\t{c}")
    seen, out = set(), []
    for ln in lines:
        child = ln.split("\t")[0]
        if child not in seen:
            seen.add(child)
            out.append(ln)
    return "\n".join(out) + "\n"


def build_embeddings(rng, dim=16):
    vecs = {}
    for canon, syn, _, _ in CONCEPTS:
        base = [rng.gauss(0, 1) for _ in range(dim)]
        vecs[canon.lower()] = base
        vecs[syn.lower()] = [x + rng.gauss(0, 0.6) for x in base]
    lines = [f"{len(vecs)} {dim}"]
    for w in sorted(vecs):
        lines.append(w + " " + " ".join(f"{x:.6f}" for x in vecs[w]))
    return "\n".join(lines) + "\n"


def own_props(attrs):
    return list(attrs)


def make_pair(rng, pool, n_types, n_gold, name_a, name_b):
    """Picks n_types concepts per side sharing n_gold of them."""
    rng.shuffle(pool)
    shared = pool[:n_gold]
    only_a = pool[n_gold:n_types]
    only_b = pool[n_types:2 * n_types - n_gold]
    by_canon = {c[0]: c for c in CONCEPTS}

    def side(concepts, use_syn, gname):
        names = {c[0] for c in concepts}
        etypes, entities = [], []
        for canon, syn, parent, attrs in concepts:
            label = syn if (use_syn and canon in {s[0] for s in shared}) else canon
            tid = label
            props = own_props(attrs) + rng.sample(GENERIC, 2)
            if use_syn and canon in {s[0] for s in shared}:
                # the candidate side models a shared concept less completely
                props = [p for p in props if rng.random() > 0.3] or props[:1]
            sup = []
            if parent and parent in names:
                p = by_canon[parent]
                sup = [p[1] if (use_syn and parent in {s[0] for s in shared}) else p[0]]
            etypes.append({"id": tid, "label": label, "props": sorted(set(props)), "superclasses": sup})
            for k in range(2):
                chosen = rng.sample(props, max(1, len(props) - 1))
                entities.append({"id": f"{tid}_{gname}_{k}", "label": f"{label} {k}", "etype": tid,
                                 "props": sorted(set(chosen))})
        etypes.sort(key=lambda e: e["id"])
        return {"name": gname, "etypes": etypes, "entities": entities}

    a = side(shared + only_a, False, name_a)
    b = side(shared + only_b, True, name_b)
    gold = [(c[0], c[1]) for c in shared]
    return a, b, sorted(gold)


def write_json(path, doc):
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=False)
        f.write("\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "conference"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    pool = [c for c in CONCEPTS]
    train_a, train_b, train_gold = make_pair(rng, list(pool), 15, 6, "CONF-TRAIN-A", "CONF-TRAIN-B")
    test_a, test_b, test_gold = make_pair(rng, list(pool), 15, 6, "CONF-A", "CONF-B")

    write_json(os.path.join(args.out, "train_a.json"), train_a)
    write_json(os.path.join(args.out, "train_b.json"), train_b)
    write_json(os.path.join(args.out, "conf_a.json"), test_a)
    write_json(os.path.join(args.out, "conf_b.json"), test_b)
    for fname, gold in (("train_gold.tsv", train_gold), ("conf_gold.tsv", test_gold)):
        with open(os.path.join(args.out, fname), "w") as f:
            for left, right in gold:
                f.write(f"{left}\t{right}\t=\t1\n")
    with open(os.path.join(args.out, "embeddings.txt"), "w") as f:
        f.write(build_embeddings(rng))
    with open(os.path.join(args.out, "taxonomy.tsv"), "w") as f:
        f.write(build_taxonomy())


if __name__ == "__main__":
    main()
