#!/usr/bin/env python3
"""Time single-candidate scoring at configurable store sizes.

Sanity benchmark for the claim that one candidate scores in well under
ten seconds on full-size databases with the default configuration.
"""
from __future__ import annotations

import argparse
import time

from fenrank.engine import CycleConfig, build_cv_sequence, score_candidate
from fenrank.rng import derive_stream
from fenrank.synth import SynthConfig, build_synthetic


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--liked", type=int, default=3000)
    parser.add_argument("--disliked", type=int, default=9300)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    started = time.perf_counter()
    result = build_synthetic(
        SynthConfig(
            liked_size=args.liked,
            disliked_size=args.disliked,
            candidates_per_side=args.repeats,
            seed=args.seed,
        )
    )
    ld_seq = build_cv_sequence(result.liked)
    dd_seq = build_cv_sequence(result.disliked)
    print(f"setup: {time.perf_counter() - started:.2f}s "
          f"({args.liked} liked / {args.disliked} disliked records)")

    config = CycleConfig(seed=args.seed)
    for index, fen in enumerate(result.liked_candidates):
        started = time.perf_counter()
        score = score_candidate(fen, ld_seq, dd_seq, config, derive_stream(config.seed, index))
        elapsed = time.perf_counter() - started
        sizes = "/".join(str(c.sample_size) for c in score.cycles)
        tests = sum(c.tests for c in score.cycles)
        print(f"candidate {index}: {elapsed:.2f}s at sizes {sizes}, "
              f"{tests} tests, arp {score.arp:.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
