#!/usr/bin/env python3
"""Regenerates tests/fixtures from fixed confusion matrices.

Usage: tools/make_fixtures.py [outdir]   (default: tests/fixtures)
"""
import json
import random
import sys
from pathlib import Path

ORDER = ["joy", "sadness", "anger", "fear", "love", "surprise"]
CODE = {"sadness": 0, "joy": 1, "love": 2, "anger": 3, "fear": 4, "surprise": 5}

# rows: gold label; columns: ORDER + invalid
PROPOSED = {
    "joy":      [525, 60, 30, 20, 50, 5, 5],
    "sadness":  [107, 372, 40, 40, 15, 2, 5],
    "anger":    [50, 60, 123, 30, 7, 2, 3],
    "fear":     [40, 40, 20, 114, 4, 4, 2],
    "love":     [90, 20, 6, 5, 33, 1, 4],
    "surprise": [30, 10, 5, 15, 2, 1, 3],
}
BASELINE = {
    "joy":      [511, 80, 30, 20, 40, 4, 10],
    "sadness":  [169, 256, 70, 60, 10, 6, 10],
    "anger":    [60, 70, 112, 20, 5, 3, 5],
    "fear":     [50, 60, 25, 73, 4, 7, 5],
    "love":     [90, 20, 5, 6, 33, 1, 4],
    "surprise": [25, 15, 5, 8, 2, 9, 2],
}
SUPPORT = {"joy": 695, "sadness": 581, "anger": 275, "fear": 224, "love": 159, "surprise": 66}

REASONING = [
    "The writer reflects on the situation and the tone suggests {w}. {w}",
    "Reading the wording closely, the feeling expressed is {w}. {w}",
    "Although it mentions joy in passing, the text overall points to {w}. {w}",
    "The speaker seems unsettled at first; the dominant emotion is {w}. {w}",
]
INVALID = ["I cannot tell from this text.", "", "The text is neutral and carries no clear feeling."]


def predictions(matrix):
    cells = []
    for gold in ORDER:
        row = matrix[gold]
        assert sum(row) == SUPPORT[gold], gold
        for col, n in enumerate(row):
            pred = ORDER[col] if col < len(ORDER) else None
            cells += [(gold, pred)] * n
    return cells


def generated(pred, style, rng):
    if pred is None:
        return rng.choice(INVALID)
    if style == "reasoning":
        return rng.choice(REASONING).format(w=pred)
    return pred


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20250101)
    golds = [g for g in ORDER for _ in range(SUPPORT[g])]
    rng.shuffle(golds)

    with open(out / "gold.jsonl", "w") as f:
        for i, g in enumerate(golds):
            f.write(json.dumps({"id": i, "text": f"fixture example {i}", "label": CODE[g]}) + "\n")

    for name, matrix, style in (("proposed", PROPOSED, "reasoning"), ("baseline", BASELINE, "label")):
        pool = {g: [] for g in ORDER}
        for gold, pred in predictions(matrix):
            pool[gold].append(pred)
        for g in ORDER:
            rng.shuffle(pool[g])
        with open(out / f"{name}.predictions.jsonl", "w") as f:
            for i, g in enumerate(golds):
                pred = pool[g].pop()
                f.write(json.dumps({"id": i, "gold": g, "generated": generated(pred, style, rng)}) + "\n")


if __name__ == "__main__":
    main()
