"""Search for pairs separating every ordered pair of non-implied congruences.

Writes ``src/ltscong/data/witnesses.json``.  For each ``(weak, strong)`` with
``strong`` not implied by ``weak``, a stored pair is equal under ``weak`` and
different under ``strong``.
"""

import json
import random
import sys
from pathlib import Path

from ltscong.congruences import CATALOGUE, canonical_key, implies
from ltscong.lts import render_lts, bisim_quotient
from ltscong.normalform import normalize
from ltscong.oracle import GenParams, random_lts

OUT = Path(__file__).resolve().parent.parent / "src" / "ltscong" / "data" / "witnesses.json"


def keys_of(l):
    nf = normalize(l)
    return tuple(canonical_key(c, nf) for c in CATALOGUE)


def main(pool_size=40000, seed=7):
    rng = random.Random(seed)
    todo = {
        (w.index, s.index)
        for w in CATALOGUE
        for s in CATALOGUE
        if w != s and not implies(w, s)
    }
    found = {}
    buckets = {}
    for i in range(pool_size):
        p = GenParams(
            states=rng.randint(1, 4),
            actions=rng.randint(1, 2),
            density=rng.choice([0.7, 1.0, 1.5, 2.0]),
            tau=rng.choice([0.0, 0.3, 0.5, 0.7]),
            seed=rng.randrange(10**9),
        )
        l = bisim_quotient(random_lts(p))
        ks = keys_of(l)
        for w, s in list(todo):
            bucket = buckets.setdefault((w, ks[w - 1]), [])
            for other, oks in bucket:
                if oks[s - 1] != ks[s - 1]:
                    found[(w, s)] = (other, l)
                    todo.discard((w, s))
                    break
        for w in range(1, 21):
            bucket = buckets.setdefault((w, ks[w - 1]), [])
            if len(bucket) < 6:
                bucket.append((l, ks))
        if not todo:
            break
    print(f"found {len(found)}, missing {sorted(todo)}", file=sys.stderr)
    data = [
        {
            "weak": w,
            "strong": s,
            "left": render_lts(a),
            "right": render_lts(b),
        }
        for (w, s), (a, b) in sorted(found.items())
    ]
    OUT.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
