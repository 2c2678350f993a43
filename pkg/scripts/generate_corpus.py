#!/usr/bin/env python3
"""Generate a synthetic NLI corpus as JSONL, deterministic for (n, seed)."""

import argparse

from informalnli.corpus import write_dataset
from informalnli.synthetic import make_corpus


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1000, help="number of examples")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", required=True, help="output JSONL path")
    args = parser.parse_args(argv)

    corpus = make_corpus(args.n, args.seed)
    digest = write_dataset(corpus, args.out)
    print(f"wrote {len(corpus)} examples to {args.out} (sha256 {digest[:16]}...)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
