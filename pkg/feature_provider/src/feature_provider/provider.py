"""Sentence embeddings and masked-LM pseudo-log-likelihood scoring.

Embeddings come from a sentence-encoder model (LaBSE-family by default);
PLL scores come from a separate masked-LM (XLM-R-family by default). Both
run in inference mode, so outputs are deterministic for a fixed model.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from transformers import AutoModel, AutoModelForMaskedLM, AutoTokenizer

FEATURES_FORMAT_VERSION = 1

DEFAULT_EMBEDDING_MODEL = "sentence-transformers/LaBSE"
DEFAULT_MLM_MODEL = "xlm-roberta-base"


@dataclass
class ProviderConfig:
    embedding_model: str = DEFAULT_EMBEDDING_MODEL
    mlm_model: str = DEFAULT_MLM_MODEL
    batch_size: int = 16
    device: str = "cpu"
    out_path: Optional[str] = None


class FeatureProvider:
    def __init__(self, config: ProviderConfig):
        self.config = config
        device = torch.device(config.device)
        self.embed_tokenizer = AutoTokenizer.from_pretrained(config.embedding_model)
        self.embed_model = AutoModel.from_pretrained(config.embedding_model)
        self.embed_model.to(device).eval()
        self.mlm_tokenizer = AutoTokenizer.from_pretrained(config.mlm_model)
        self.mlm_model = AutoModelForMaskedLM.from_pretrained(config.mlm_model)
        self.mlm_model.to(device).eval()
        self.device = device
        self.embedding_dim = int(self.embed_model.config.hidden_size)

    @torch.no_grad()
    def embed_sentences(self, sentences: list[str]) -> list[np.ndarray]:
        """One L2-normalized vector per sentence (CLS pooling, LaBSE-style)."""
        if any(not s for s in sentences):
            raise ValueError("sentences must be non-empty strings")
        vectors: list[np.ndarray] = []
        for start in range(0, len(sentences), self.config.batch_size):
            batch = sentences[start:start + self.config.batch_size]
            enc = self.embed_tokenizer(batch, padding=True, truncation=True,
                                       return_tensors="pt").to(self.device)
            hidden = self.embed_model(**enc).last_hidden_state
            pooled = hidden[:, 0, :]
            pooled = torch.nn.functional.normalize(pooled, p=2, dim=1)
            vectors.extend(v.cpu().numpy().astype(np.float64) for v in pooled)
        return vectors

    @torch.no_grad()
    def pll_score(self, sentence: str) -> float:
        """Masked-LM pseudo-log-likelihood: sum over positions of the
        log-probability of the true token with that position masked."""
        enc = self.mlm_tokenizer(sentence, return_tensors="pt", truncation=True)
        input_ids = enc["input_ids"][0]
        # structural specials (CLS/SEP/PAD/...) are never scored; UNK is
        structural = set(self.mlm_tokenizer.all_special_ids)
        structural.discard(self.mlm_tokenizer.unk_token_id)
        positions = [i for i, tok in enumerate(input_ids.tolist())
                     if tok not in structural]
        if not positions:
            raise ValueError(f"sentence tokenizes to no content tokens: {sentence!r}")
        mask_id = self.mlm_tokenizer.mask_token_id
        total = 0.0
        for start in range(0, len(positions), self.config.batch_size):
            chunk = positions[start:start + self.config.batch_size]
            batch = input_ids.repeat(len(chunk), 1)
            for row, pos in enumerate(chunk):
                batch[row, pos] = mask_id
            attention = enc["attention_mask"].repeat(len(chunk), 1)
            logits = self.mlm_model(input_ids=batch.to(self.device),
                                    attention_mask=attention.to(self.device)).logits
            log_probs = torch.log_softmax(logits.double(), dim=-1)
            for row, pos in enumerate(chunk):
                total += float(log_probs[row, pos, input_ids[pos]])
        return total

    def pll_scores(self, sentences: list[str]) -> list[float]:
        return [self.pll_score(s) for s in sentences]


def _parse_dataset_lines(path: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: malformed JSON ({e.msg})") from e
            for key in ("id", "english", "hindi", "synthetic_hinglish", "human_hinglish"):
                if key not in obj:
                    raise ValueError(f"{path}:{lineno}: missing field {key!r}")
            records.append(obj)
    return records


def emit_features(dataset_path: str, out_path: str, provider: FeatureProvider) -> int:
    """Compute all features for every dataset record and write the features file.

    Returns the number of records written. The file is written atomically,
    so a model failure never leaves a partial file behind.
    """
    records = _parse_dataset_lines(dataset_path)
    lines = [json.dumps({"version": FEATURES_FORMAT_VERSION,
                         "embedding_dim": provider.embedding_dim})]
    for rec in records:
        emb_en, emb_hi, emb_syn = provider.embed_sentences(
            [rec["english"], rec["hindi"], rec["synthetic_hinglish"]])
        pll_syn = provider.pll_score(rec["synthetic_hinglish"])
        pll_human = provider.pll_scores(rec["human_hinglish"])
        n_tok = len(provider.mlm_tokenizer(rec["synthetic_hinglish"])["input_ids"])
        lines.append(json.dumps({
            "id": rec["id"],
            "embedding_english": emb_en.tolist(),
            "embedding_hindi": emb_hi.tolist(),
            "embedding_synthetic": emb_syn.tolist(),
            "pll_synthetic": pll_syn,
            "pll_human": pll_human,
            # per-token-normalized extra; ignored by the downstream parser
            "pll_synthetic_per_token": pll_syn / max(1, n_tok),
        }))
    tmp = out_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, out_path)
    return len(records)
