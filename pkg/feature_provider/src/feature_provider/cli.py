"""CLI for emitting the features file consumed by the hinglishqe pipeline."""

from __future__ import annotations

import argparse
import sys

from .provider import (DEFAULT_EMBEDDING_MODEL, DEFAULT_MLM_MODEL,
                       FeatureProvider, ProviderConfig, emit_features)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feature-provider",
        description="Compute sentence embeddings and masked-LM PLL features")
    parser.add_argument("--dataset", required=True, help="dataset file (JSONL)")
    parser.add_argument("--out", required=True, help="features file to write")
    parser.add_argument("--embedding-model", default=DEFAULT_EMBEDDING_MODEL)
    parser.add_argument("--mlm-model", default=DEFAULT_MLM_MODEL)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = ProviderConfig(embedding_model=args.embedding_model,
                            mlm_model=args.mlm_model,
                            batch_size=args.batch_size,
                            device=args.device,
                            out_path=args.out)
    provider = FeatureProvider(config)
    n = emit_features(args.dataset, args.out, provider)
    print(f"wrote {n} feature records (embedding_dim={provider.embedding_dim}) "
          f"to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
