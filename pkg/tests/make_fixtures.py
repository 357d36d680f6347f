"""Regenerates the bundled 20-instance fixture files (deterministic, E=4).

Run from the repo root: python3 tests/make_fixtures.py
"""

import json
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "fixtures")

LIDS = ["L1", "L2", "OTHER"]
POS = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "ADP", "AUX", "DET", None]
WORDS = ["ghar", "chalo", "school", "is", "open", "aaj", "kal", "good",
         "bahut", "nice", "jaana", "hai", "the", "was", "accha"]


def main():
    rng = np.random.default_rng(20220707)
    os.makedirs(OUT, exist_ok=True)
    dataset, tagged, features = [], [], []
    features.append(json.dumps({"version": 1, "embedding_dim": 4}))
    for i in range(20):
        rid = f"inst-{i:03d}"
        a = int(rng.integers(1, 11))
        b = int(rng.integers(1, 11))
        n_human = int(rng.integers(1, 4))
        dataset.append(json.dumps({
            "id": rid,
            "english": f"english sentence {i}",
            "hindi": f"hindi sentence {i}",
            "human_hinglish": [f"human hinglish {i}.{j}" for j in range(n_human)],
            "synthetic_hinglish": f"synthetic hinglish {i}",
            "generation_method": ["rule-a", "rule-b"][i % 2],
            "rating_a": a,
            "rating_b": b,
        }))
        n_tok = int(rng.integers(3, 9))
        tokens = []
        for _ in range(n_tok):
            pos = POS[int(rng.integers(0, len(POS)))]
            tokens.append({
                "text": WORDS[int(rng.integers(0, len(WORDS)))],
                "lid": LIDS[int(rng.integers(0, 3))],
                "pos": pos,
            })
        tagged.append(json.dumps({"id": rid, "tokens": tokens}))
        features.append(json.dumps({
            "id": rid,
            "embedding_english": [round(float(v), 6) for v in rng.normal(size=4)],
            "embedding_hindi": [round(float(v), 6) for v in rng.normal(size=4)],
            "embedding_synthetic": [round(float(v), 6) for v in rng.normal(size=4)],
            "pll_synthetic": round(float(-rng.uniform(20, 80)), 6),
            "pll_human": [round(float(-rng.uniform(20, 80)), 6) for _ in range(n_human)],
        }))
    for name, lines in [("dataset.jsonl", dataset), ("tagged.jsonl", tagged),
                        ("features.jsonl", features)]:
        with open(os.path.join(OUT, name), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
