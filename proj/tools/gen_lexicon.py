#!/usr/bin/env python3
"""Regenerates fixtures/lexicon.txt, the bundled 16-dimensional lexicon.

Vectors mix a shared per-category direction with a per-word direction so that
words of one category (colors, object kinds, motion verbs) sit closer to each
other than to the rest. Synonym groups get one vector via the header lines.
Output is deterministic for a fixed seed.
"""
import sys

import numpy as np

DIM = 16
SEED = 2022

SYNONYMS = [
    ["ball", "circle", "sphere"],
    ["box", "cube", "square"],
    ["key"],
    ["go", "navigate", "walk", "move"],
    ["pick", "grab"],
    ["put", "place"],
    ["grey", "gray"],
]

# word -> (category, category weight)
WORDS = {
    "the": ("article", 0.7), "a": ("article", 0.7),
    "to": ("preposition", 0.5), "up": ("particle", 0.3), "next": ("preposition", 0.5),
    "then": ("connective", 0.6),
    "go": ("motion", 0.6), "pick": ("grasp", 0.6), "put": ("place", 0.6),
    "blue": ("color", 0.6), "green": ("color", 0.6), "grey": ("color", 0.6),
    "purple": ("color", 0.6), "red": ("color", 0.6), "yellow": ("color", 0.6),
    "ball": ("kind", 0.6), "box": ("kind", 0.6), "key": ("kind", 0.6),
}

# Related but distinct user words: vector = mix of a base word and noise.
NEAR = {
    "toward": ("to", 0.85), "towards": ("to", 0.85),
    "beside": ("next", 0.8), "near": ("next", 0.8), "adjacent": ("next", 0.75),
    "take": ("pick", 0.8), "get": ("pick", 0.7), "carry": ("pick", 0.7), "lift": ("pick", 0.75),
    "drop": ("put", 0.8), "bring": ("put", 0.7), "set": ("put", 0.7),
    "reach": ("go", 0.75), "approach": ("go", 0.8), "head": ("go", 0.7),
    "and": ("then", 0.8), "after": ("then", 0.7), "afterwards": ("then", 0.75),
    "object": ("ball", 0.4), "thing": ("ball", 0.35), "item": ("ball", 0.4),
    "crate": ("box", 0.85), "container": ("box", 0.8), "orb": ("ball", 0.85),
    "violet": ("purple", 0.9), "pink": ("red", 0.6), "orange": ("yellow", 0.6), "cyan": ("blue", 0.7),
}


def unit(v):
    return v / np.linalg.norm(v)


def main(out):
    rng = np.random.default_rng(SEED)
    categories = {}
    vectors = {}
    for word, (cat, weight) in WORDS.items():
        if cat not in categories:
            categories[cat] = unit(rng.standard_normal(DIM))
        own = unit(rng.standard_normal(DIM))
        vectors[word] = unit(weight * categories[cat] + np.sqrt(1 - weight**2) * own)
    for word, (base, weight) in NEAR.items():
        own = unit(rng.standard_normal(DIM))
        vectors[word] = unit(weight * vectors[base] + np.sqrt(1 - weight**2) * own)

    out.write("# Bundled lexicon: token<TAB>16 floats. Regenerate with tools/gen_lexicon.py.\n")
    for group in SYNONYMS:
        out.write("#synonyms: " + " ".join(group) + "\n")
    for word in sorted(vectors):
        out.write(word + "\t" + " ".join(f"{x:.6f}" for x in vectors[word]) + "\n")


if __name__ == "__main__":
    main(sys.stdout)
