#!/usr/bin/env python3
"""Deterministic synthetic corpora for the test suite.

desk: paper-title lines plus a phrase<TAB>type lexicon, to be distance-labeled
      with `csner distance-label`. Method and dataset names are built from
      syllables with type-specific shapes so a character model can generalize
      to names it has not seen.
toy:  a small CoNLL corpus in which every word has exactly one tag.
vectors: "count dim" header and lower-case word vectors covering part of the
      toy vocabulary plus words it never uses.
"""

import argparse
import random
from pathlib import Path

SYLLABLES = ["ka", "lo", "mi", "ru", "ve", "ta", "no", "si", "pe", "da", "zu",
             "ri", "fo", "ne", "gu", "ba", "xe", "wi", "ho", "ly", "qu", "je"]
METHOD_SUFFIXES = ["Net", "BERT", "Former", "GAN", "LSTM", "Flow"]
PROBLEMS = [
    "question answering", "machine translation", "named entity recognition",
    "sentiment analysis", "relation extraction", "text summarization",
    "dependency parsing", "image classification", "object detection",
    "speech recognition", "semantic segmentation", "link prediction",
    "entity linking", "reading comprehension", "text classification",
    "knowledge graph completion", "pose estimation", "image captioning",
    "coreference resolution", "semantic role labeling", "keyphrase extraction",
    "dialogue generation", "code search", "table retrieval",
]
LANGUAGES = ["Urdu", "Swahili", "German", "Hindi", "Basque", "Tamil", "Yoruba"]
TOOLS = ["spaCy", "NLTK", "Stanza", "PyTorch", "Weka", "Gensim"]
ADJECTIVES = ["Simple", "Robust", "Efficient", "Scalable", "Unified", "Lightweight",
              "Neural", "Hierarchical", "Contrastive", "Sparse"]
FILLER_NOUNS = ["Approach", "Framework", "Study", "Model", "Analysis", "Method"]

TEMPLATES = [
    "{M}: A {A} {N} for {P}",
    "{P} with {M} on {D}",
    "Improving {P} via {M}",
    "{M} for {P}",
    "Towards {A} {P}",
    "Learning {P} from {D}",
    "{D}: A Benchmark for {P}",
    "{A} {P} using {M} and {T}",
    "{P} in {L} with {M}",
    "Revisiting {M} for {L} {P}",
    "An Empirical Study of {P} on {D} and {D2}",
    "{M} and {M2}: {A} Models for {P}",
    "Scaling {M} to {P}",
    "Cross-lingual {P} for {L}",
    "A {A} {N} of {M} on {D}",
]


def title_case(phrase):
    return " ".join(w[:1].upper() + w[1:] for w in phrase.split())


def make_names(rng, count, shape):
    names = set()
    while len(names) < count:
        stem = "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(1, 2)))
        if shape == "method":
            names.add(stem.capitalize() + rng.choice(METHOD_SUFFIXES))
        else:
            names.add(stem.upper() + "-" + str(rng.randint(1, 99)))
    return sorted(names)


def desk(out_dir, count, seed):
    rng = random.Random(seed)
    methods = make_names(rng, 700, "method")
    datasets = make_names(rng, 400, "dataset")
    titles = []
    for _ in range(count):
        m, m2 = rng.sample(methods, 2)
        d, d2 = rng.sample(datasets, 2)
        p = rng.choice(PROBLEMS)
        if rng.random() < 0.5:
            p = title_case(p)
        titles.append(rng.choice(TEMPLATES).format(
            M=m, M2=m2, D=d, D2=d2, P=p, A=rng.choice(ADJECTIVES),
            N=rng.choice(FILLER_NOUNS), T=rng.choice(TOOLS), L=rng.choice(LANGUAGES)))
    # Lexicons used for distance labeling are incomplete.
    lexicon = [(p, "research-problem") for p in PROBLEMS]
    lexicon += [(m, "method") for m in methods if rng.random() < 0.97]
    lexicon += [(d, "dataset") for d in datasets if rng.random() < 0.97]
    lexicon += [(t, "tool") for t in TOOLS]
    lexicon += [(lang, "language") for lang in LANGUAGES]
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "titles.txt").write_text("\n".join(titles) + "\n")
    (out_dir / "lexicon.tsv").write_text("".join(f"{p}\t{t}\n" for p, t in lexicon))


TOY_PROBLEMS = [("graph", "coloring"), ("route", "planning"), ("image", "retrieval"),
                ("query", "rewriting"), ("music", "tagging")]
TOY_METHODS = ["Zorblat", "Quinnet", "Heliox", "Marrow", "Tesselate"]
TOY_DATASETS = ["PEBBLE", "CANYON", "ORCHID", "LANTERN"]
TOY_TEMPLATES = [
    ["P", "with", "M"],
    ["M", "solves", "P", "on", "D"],
    ["a", "study", "of", "P"],
    ["M", "meets", "D"],
    ["towards", "better", "P", "using", "M", "and", "D"],
    ["D", "benchmark", "for", "P"],
]


def toy(path, seed):
    rng = random.Random(seed)
    blocks = []
    for i in range(50):
        rows = []
        for slot in TOY_TEMPLATES[i % len(TOY_TEMPLATES)]:
            if slot == "P":
                head, tail = rng.choice(TOY_PROBLEMS)
                rows += [(head, "B-research-problem"), (tail, "I-research-problem")]
            elif slot == "M":
                rows.append((rng.choice(TOY_METHODS), "B-method"))
            elif slot == "D":
                rows.append((rng.choice(TOY_DATASETS), "B-dataset"))
            else:
                rows.append((slot, "O"))
        blocks.append("\n".join(f"{w}\t{t}" for w, t in rows))
    path.write_text("\n\n".join(blocks) + "\n")


def vectors(path, seed, dim=8):
    rng = random.Random(seed)
    words = sorted({w.lower() for pair in TOY_PROBLEMS for w in pair})
    words += [m.lower() for m in TOY_METHODS[:3]] + ["with", "of", "for"]
    words += ["the", "unrelated", "zebra"]
    lines = [f"{len(words)} {dim}"]
    for w in words:
        lines.append(w + " " + " ".join(f"{rng.uniform(-1, 1):.6f}" for _ in range(dim)))
    path.write_text("\n".join(lines) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=["desk", "toy", "vectors"], required=True)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--count", type=int, default=2400)
    parser.add_argument("--seed", type=int, default=2023)
    args = parser.parse_args()
    if args.kind == "desk":
        desk(args.out, args.count, args.seed)
    elif args.kind == "toy":
        toy(args.out, args.seed)
    else:
        vectors(args.out, args.seed)


if __name__ == "__main__":
    main()
