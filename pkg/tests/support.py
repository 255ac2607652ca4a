"""Shared builders for the test suite."""

import random

from ltscong import Lts, TAU, make_constant, prefix
from ltscong.oracle import GenParams, random_lts


def split_example():
    """c -a-> r, c -b-> r, c -b-> l, l tau-loop, r a-loop."""
    return Lts.build(
        ("a", "b"),
        [("c", "a", "r"), ("c", "b", "r"), ("c", "b", "l"), ("l", TAU, "l"), ("r", "a", "r")],
        "c",
    )


def a_stop():
    return prefix("a", make_constant("stop", {"a"}))


def tau_a():
    """Initial state with a tau-move and an a-move, both to deadlocks."""
    return Lts.build(("a",), [("i", TAU, "d1"), ("i", "a", "d2")], "i")


def corpus_params(rng, max_states=8, max_actions=3):
    return GenParams(
        states=rng.randint(1, max_states),
        actions=rng.randint(0, max_actions),
        density=rng.choice((0.5, 1.0, 1.5, 2.0, 2.5)),
        tau=rng.choice((0.0, 0.15, 0.3, 0.5)),
        seed=rng.randrange(2**32),
    )


def corpus(n, seed=0, **kw):
    rng = random.Random(seed)
    return [random_lts(corpus_params(rng, **kw)) for _ in range(n)]


def end_states(l, trace):
    """Set of states reachable by ``trace`` (brute force), possibly empty."""
    cur = l.tau_closure([l.initial])
    for a in trace:
        nxt = {t for s in cur for b, t in l.succ[s] if b == a}
        cur = l.tau_closure(nxt)
    return frozenset(cur)


# acceptance bookkeeping: one line per criterion in the terminal summary
RESULTS = {}


def criterion(number, title):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS[number] = (title, False, f"{type(exc).__name__}: {exc}".splitlines()[0])
                raise
            RESULTS[number] = (title, True, detail or "")

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def summary_lines():
    lines = []
    for n in sorted(RESULTS):
        title, ok, detail = RESULTS[n]
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f" ({detail})"
        lines.append(line)
    return lines


def lts_strategy(max_states=6, max_actions=3):
    """Hypothesis strategy drawing seeded random LTSs."""
    from hypothesis import strategies as st

    return st.builds(
        lambda n, k, d, t, seed: random_lts(GenParams(n, k, d, t, seed)),
        st.integers(1, max_states),
        st.integers(0, max_actions),
        st.sampled_from((0.5, 1.0, 1.5, 2.0)),
        st.sampled_from((0.0, 0.2, 0.4)),
        st.integers(0, 2**32 - 1),
    )


def naive_bisimilar(l1, l2):
    """Greatest fixpoint over all state pairs, tau treated as a label."""
    if l1.alphabet != l2.alphabet:
        return False
    rel = {(s, t) for s in range(l1.size) for t in range(l2.size)}
    changed = True
    while changed:
        changed = False
        for s, t in list(rel):
            ok = all(
                any(b == a and (s2, t2) in rel for b, t2 in l2.succ[t])
                for a, s2 in l1.succ[s]
            ) and all(
                any(b == a and (s2, t2) in rel for b, s2 in l1.succ[s])
                for a, t2 in l2.succ[t]
            )
            if not ok:
                rel.discard((s, t))
                changed = True
    return (l1.initial, l2.initial) in rel
