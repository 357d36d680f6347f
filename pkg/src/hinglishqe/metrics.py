"""LID- and POS-based code-mixing metrics for a single tagged sentence.

All metrics depend only on the LID/POS sequences, never on token text.
OTHER tokens are transparent: they are removed before span and switch
analysis. Degenerate inputs yield value 0.0 with the metric's valid flag
set to False instead of raising, so batch extraction never aborts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .core import LidLabel, PosLabel, POS_TAGS, TaggedSentence


@dataclass(frozen=True)
class LanguageSpan:
    lid: LidLabel   # L1 or L2 only
    length: int


@dataclass(frozen=True)
class MetricVector:
    id: str
    cmi: float
    switch_points: int
    burstiness: float
    symcom_su: dict            # PosLabel -> float, all 17 tags present
    symcom_sent: float
    valid_cmi: bool
    valid_switch_points: bool
    valid_burstiness: bool
    valid_symcom_su: dict      # PosLabel -> bool
    valid_symcom_sent: bool


def language_spans(sentence: TaggedSentence) -> list[LanguageSpan]:
    """Maximal runs of same-language tokens, with OTHER tokens skipped."""
    lids = [t.lid for t in sentence.tokens if t.lid is not LidLabel.OTHER]
    spans: list[LanguageSpan] = []
    for lid in lids:
        if spans and spans[-1].lid is lid:
            spans[-1] = LanguageSpan(lid, spans[-1].length + 1)
        else:
            spans.append(LanguageSpan(lid, 1))
    return spans


def cmi(sentence: TaggedSentence) -> float:
    """Code-Mixing Index: (sum(w_i) - max(w_i)) / (n - u); 0 if no language tokens."""
    n = len(sentence.tokens)
    counts = {LidLabel.L1: 0, LidLabel.L2: 0}
    u = 0
    for t in sentence.tokens:
        if t.lid is LidLabel.OTHER:
            u += 1
        else:
            counts[t.lid] += 1
    if n - u == 0:
        return 0.0
    total = counts[LidLabel.L1] + counts[LidLabel.L2]
    return (total - max(counts.values())) / (n - u)


def switch_points(sentence: TaggedSentence) -> int:
    """Number of adjacent unequal-language pairs after dropping OTHER tokens."""
    lids = [t.lid for t in sentence.tokens if t.lid is not LidLabel.OTHER]
    return sum(1 for a, b in zip(lids, lids[1:]) if a is not b)


def burstiness(sentence: TaggedSentence) -> float:
    """(sigma - mean)/(sigma + mean) over span lengths, population sigma; 0 if no spans."""
    lengths = [s.length for s in language_spans(sentence)]
    if not lengths:
        return 0.0
    m = sum(lengths) / len(lengths)
    var = sum((x - m) ** 2 for x in lengths) / len(lengths)
    sigma = math.sqrt(var)
    return (sigma - m) / (sigma + m)


def symcom_su(sentence: TaggedSentence, su: PosLabel) -> float:
    """Per-POS language skew: (count_L1 - count_L2)/(count_L1 + count_L2); 0 if unseen."""
    c1 = c2 = 0
    for t in sentence.tokens:
        if t.pos is not su:
            continue
        if t.lid is LidLabel.L1:
            c1 += 1
        elif t.lid is LidLabel.L2:
            c2 += 1
    if c1 + c2 == 0:
        return 0.0
    return (c1 - c2) / (c1 + c2)


def symcom_sent(sentence: TaggedSentence) -> float:
    """Count-weighted mean of |per-POS skew| over language-labeled, POS-tagged tokens."""
    counts: dict[PosLabel, list[int]] = {}
    for t in sentence.tokens:
        if t.pos is None or t.lid is LidLabel.OTHER:
            continue
        pair = counts.setdefault(t.pos, [0, 0])
        pair[0 if t.lid is LidLabel.L1 else 1] += 1
    length = sum(c1 + c2 for c1, c2 in counts.values())
    if length == 0:
        return 0.0
    total = 0.0
    for c1, c2 in counts.values():
        total += (c1 + c2) / length * abs((c1 - c2) / (c1 + c2))
    return total


def metric_vector(sentence: TaggedSentence) -> MetricVector:
    """All metrics for one sentence, with validity flags for degenerate cases."""
    n_lang = sum(1 for t in sentence.tokens if t.lid is not LidLabel.OTHER)
    spans = language_spans(sentence)
    lang_pos = sum(
        1 for t in sentence.tokens
        if t.lid is not LidLabel.OTHER and t.pos is not None
    )
    su_values = {}
    su_valid = {}
    for tag in PosLabel:
        seen = any(
            t.pos is tag and t.lid is not LidLabel.OTHER for t in sentence.tokens
        )
        su_values[tag] = symcom_su(sentence, tag) if seen else 0.0
        su_valid[tag] = seen
    return MetricVector(
        id=sentence.id,
        cmi=cmi(sentence),
        switch_points=switch_points(sentence),
        burstiness=burstiness(sentence),
        symcom_su=su_values,
        symcom_sent=symcom_sent(sentence),
        valid_cmi=n_lang > 0,
        valid_switch_points=n_lang > 0,
        valid_burstiness=len(spans) > 0,
        valid_symcom_su=su_valid,
        valid_symcom_sent=lang_pos > 0,
    )


# Canonical ordering of the 21 metric features used by the regression input.
METRIC_FEATURE_NAMES = (
    "cmi", "switch_points", "burstiness", "symcom_sent",
    *(f"symcom_{t}" for t in POS_TAGS),
)


def metric_feature_values(mv: MetricVector) -> list[float]:
    """The 21 metric features in canonical order; invalid metrics imputed as 0.0."""
    values = [mv.cmi, float(mv.switch_points), mv.burstiness, mv.symcom_sent]
    values.extend(mv.symcom_su[tag] for tag in PosLabel)
    return values


def metric_vector_to_json(mv: MetricVector) -> str:
    return json.dumps({
        "id": mv.id,
        "cmi": mv.cmi,
        "switch_points": mv.switch_points,
        "burstiness": mv.burstiness,
        "symcom_su": {tag.value: mv.symcom_su[tag] for tag in PosLabel},
        "symcom_sent": mv.symcom_sent,
        "valid": {
            "cmi": mv.valid_cmi,
            "switch_points": mv.valid_switch_points,
            "burstiness": mv.valid_burstiness,
            "symcom_sent": mv.valid_symcom_sent,
            "symcom_su": {tag.value: mv.valid_symcom_su[tag] for tag in PosLabel},
        },
    })
