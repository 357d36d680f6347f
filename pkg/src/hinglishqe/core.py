"""Data model, dataset ingestion, and target derivation for Hinglish quality rating."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class DataFormatError(ValueError):
    """Raised when an input file violates the on-disk schema."""


class LidLabel(str, Enum):
    L1 = "L1"  # Hindi, by convention of this dataset
    L2 = "L2"  # English
    OTHER = "OTHER"


# Universal POS tags, fixed order (also the canonical feature order).
POS_TAGS = (
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
)

PosLabel = Enum("PosLabel", {t: t for t in POS_TAGS}, type=str)


@dataclass(frozen=True)
class TaggedToken:
    text: str
    lid: LidLabel
    pos: Optional[PosLabel] = None

    def __post_init__(self):
        if not self.text:
            raise DataFormatError("token text must be non-empty")
        if any(c.isspace() for c in self.text):
            raise DataFormatError(f"token text contains whitespace: {self.text!r}")


@dataclass(frozen=True)
class TaggedSentence:
    id: str
    tokens: tuple[TaggedToken, ...]

    def __post_init__(self):
        if len(self.tokens) == 0:
            raise DataFormatError(f"sentence {self.id!r} has no tokens")


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    english: str
    hindi: str
    human_hinglish: tuple[str, ...]
    synthetic_hinglish: str
    generation_method: str
    rating_a: int
    rating_b: int

    def __post_init__(self):
        if len(self.human_hinglish) < 1:
            raise DataFormatError(f"record {self.id!r}: human_hinglish must be non-empty")
        for field in ("rating_a", "rating_b"):
            r = getattr(self, field)
            if not isinstance(r, int) or isinstance(r, bool) or not 1 <= r <= 10:
                raise DataFormatError(
                    f"record {self.id!r}: {field}={r!r} out of range [1,10]"
                )


@dataclass(frozen=True)
class TaskTarget:
    id: str
    quality: int        # half-up rounded mean of the two ratings, in [1,10]
    disagreement: int   # |rating_a - rating_b|, in [0,9]


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def derive_targets(record: DatasetRecord) -> TaskTarget:
    """Quality = half-up rounded average rating; disagreement = absolute rating gap."""
    quality = round_half_up((record.rating_a + record.rating_b) / 2.0)
    disagreement = abs(record.rating_a - record.rating_b)
    return TaskTarget(id=record.id, quality=quality, disagreement=disagreement)


def _json_line(line: str, lineno: int, path: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path}:{lineno}: malformed JSON ({e.msg})") from e
    if not isinstance(obj, dict):
        raise DataFormatError(f"{path}:{lineno}: expected a JSON object")
    return obj


def _require(obj: dict, key: str, lineno: int, path: str):
    if key not in obj:
        raise DataFormatError(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def parse_dataset(path: str) -> list[DatasetRecord]:
    """Parse a dataset file: one JSON record per line (see README for the schema)."""
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = _json_line(line, lineno, path)
            try:
                rec = DatasetRecord(
                    id=str(_require(obj, "id", lineno, path)),
                    english=str(_require(obj, "english", lineno, path)),
                    hindi=str(_require(obj, "hindi", lineno, path)),
                    human_hinglish=tuple(_require(obj, "human_hinglish", lineno, path)),
                    synthetic_hinglish=str(_require(obj, "synthetic_hinglish", lineno, path)),
                    generation_method=str(_require(obj, "generation_method", lineno, path)),
                    rating_a=_require(obj, "rating_a", lineno, path),
                    rating_b=_require(obj, "rating_b", lineno, path),
                )
            except DataFormatError as e:
                raise DataFormatError(f"{path}:{lineno}: {e}") from e
            if rec.id in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    return records


def serialize_dataset(records: list[DatasetRecord]) -> str:
    lines = []
    for r in records:
        lines.append(json.dumps({
            "id": r.id,
            "english": r.english,
            "hindi": r.hindi,
            "human_hinglish": list(r.human_hinglish),
            "synthetic_hinglish": r.synthetic_hinglish,
            "generation_method": r.generation_method,
            "rating_a": r.rating_a,
            "rating_b": r.rating_b,
        }, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_tagged(path: str) -> list[TaggedSentence]:
    """Parse a tagged-sentence file: per line {id, tokens: [{text, lid, pos}]}."""
    sentences: list[TaggedSentence] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = _json_line(line, lineno, path)
            sid = str(_require(obj, "id", lineno, path))
            if sid in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate id {sid!r}")
            seen.add(sid)
            raw_tokens = _require(obj, "tokens", lineno, path)
            tokens = []
            for tok in raw_tokens:
                lid_raw = tok.get("lid")
                try:
                    lid = LidLabel(lid_raw)
                except ValueError:
                    raise DataFormatError(
                        f"{path}:{lineno}: unknown LID label {lid_raw!r}"
                    ) from None
                pos_raw = tok.get("pos")
                pos = None
                if pos_raw is not None:
                    try:
                        pos = PosLabel(pos_raw)
                    except ValueError:
                        raise DataFormatError(
                            f"{path}:{lineno}: unknown POS tag {pos_raw!r}"
                        ) from None
                try:
                    tokens.append(TaggedToken(text=str(tok.get("text")), lid=lid, pos=pos))
                except DataFormatError as e:
                    raise DataFormatError(f"{path}:{lineno}: {e}") from e
            try:
                sentences.append(TaggedSentence(id=sid, tokens=tuple(tokens)))
            except DataFormatError as e:
                raise DataFormatError(f"{path}:{lineno}: {e}") from e
    return sentences


def serialize_tagged(sentences: list[TaggedSentence]) -> str:
    lines = []
    for s in sentences:
        lines.append(json.dumps({
            "id": s.id,
            "tokens": [
                {"text": t.text, "lid": t.lid.value,
                 "pos": t.pos.value if t.pos is not None else None}
                for t in s.tokens
            ],
        }, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")
