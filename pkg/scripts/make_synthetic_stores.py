#!/usr/bin/env python3
"""Generate a synthetic liked/disliked store pair plus candidate files.

The stores land in --out as the usual PGN + sidecar layout; held-out
candidate FENs are written next to them as newline-delimited lists so
they can be fed straight to `fenrank rank` or the triage service.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from fenrank.store import Store
from fenrank.synth import SynthConfig, install_stores


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="fenrank_store", help="store directory to create")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--liked", type=int, default=520, help="liked store size")
    parser.add_argument("--disliked", type=int, default=560, help="disliked store size")
    parser.add_argument("--candidates", type=int, default=20, help="candidates per side")
    args = parser.parse_args()

    config = SynthConfig(
        liked_size=args.liked,
        disliked_size=args.disliked,
        candidates_per_side=args.candidates,
        seed=args.seed,
    )
    out = Path(args.out)
    result = install_stores(Store(out), config)
    liked_path = out / "liked_candidates.fen"
    disliked_path = out / "disliked_candidates.fen"
    liked_path.write_text(
        "".join(f"{fen.text}\n" for fen in result.liked_candidates), encoding="utf-8"
    )
    disliked_path.write_text(
        "".join(f"{fen.text}\n" for fen in result.disliked_candidates), encoding="utf-8"
    )
    print(f"{len(result.liked)} liked / {len(result.disliked)} disliked records in {out}")
    print(f"candidates: {liked_path} and {disliked_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
