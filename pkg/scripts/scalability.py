"""Time frequent mining on a synthetic database and recheck every support.

    python scripts/scalability.py --sequences 200 --length 20 --items 20 --minsup 0.1
"""

import argparse
import random
import time
from dataclasses import dataclass, fields

from cpseqmine import MiningQuery, SequenceDatabase, mine
from cpseqmine.seqdb import supporting


@dataclass
class ScaleConfig:
    sequences: int = 200
    length: int = 20
    items: int = 20
    minsup: float = 0.1
    seed: int = 7
    closed: bool = False


def synthetic(cfg: ScaleConfig) -> SequenceDatabase:
    rng = random.Random(cfg.seed)
    alphabet = [f"i{k}" for k in range(cfg.items)]
    rows = [[rng.choice(alphabet) for _ in range(cfg.length)] for _ in range(cfg.sequences)]
    return SequenceDatabase.from_tokens(rows)


def run(cfg: ScaleConfig) -> dict:
    db = synthetic(cfg)
    started = time.perf_counter()
    results, stats = mine(db, MiningQuery(minsup=cfg.minsup, closed=cfg.closed))
    elapsed = time.perf_counter() - started
    bad = [r for r in results if tuple(supporting(db, r.pattern)) != r.sids]
    longest = max((len(r.pattern) for r in results), default=0)
    return {
        "patterns": len(results),
        "longest": longest,
        "nodes": stats.nodes,
        "fails": stats.fails,
        "seconds": round(elapsed, 2),
        "support_errors": len(bad),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(ScaleConfig):
        if f.type is bool:
            parser.add_argument(f"--{f.name}", action="store_true")
        else:
            parser.add_argument(f"--{f.name}", type=type(f.default), default=f.default)
    cfg = ScaleConfig(**vars(parser.parse_args()))
    print(cfg)
    for key, value in run(cfg).items():
        print(f"{key:>15}: {value}")


if __name__ == "__main__":
    main()
