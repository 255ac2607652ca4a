"""Brute-force bounded semantics and a seeded random LTS generator.

Everything here works directly on the LTS by unfolding executions trace by
trace.  It shares no code with the normal-form machinery so that the two can
be checked against each other.
"""

import random
import string
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product

from .lts import TAU, Lts, classify_state

REFUSAL_COMPONENTS = ("SF", "NF", "SNF", "ANF", "SANF", "CFAIL")
BIT_COMPONENTS = ("TR", "DL", "DIV", "MIND", "EXTT", "ANT", "CDIV")


def _subsets(actions):
    actions = sorted(actions)
    return [
        frozenset(c) for n in range(len(actions) + 1) for c in combinations(actions, n)
    ]


def _end_states(l, depth):
    """Map every trace of length at most ``depth`` to the states it can end in."""
    start = l.tau_closure([l.initial])
    out = {(): start}
    frontier = [((), start)]
    for _ in range(depth):
        nxt = []
        for trace, states in frontier:
            for a in sorted(l.alphabet):
                reached = set()
                for s in states:
                    for b, t in l.succ[s]:
                        if b == a:
                            reached.add(t)
                if reached:
                    closed = l.tau_closure(reached)
                    out[trace + (a,)] = closed
                    nxt.append((trace + (a,), closed))
        frontier = nxt
    return out


@dataclass(frozen=True)
class BoundedSemantics:
    """Every semantic component restricted to traces of length at most ``depth``.

    Failure components are explicit downward-closed sets of ``(trace, refusal)``.
    """

    depth: int
    alphabet: frozenset
    tr: frozenset
    dl: frozenset
    div: frozenset
    mind: frozenset
    extt: frozenset
    ant: frozenset
    sf: frozenset
    nf: frozenset
    snf: frozenset
    anf: frozenset
    sanf: frozenset
    cfail: frozenset
    cdiv: frozenset

    def bit(self, component, trace):
        return trace in getattr(self, component.lower())

    @cached_property
    def _by_trace(self):
        index = {}
        for name in REFUSAL_COMPONENTS:
            per = {}
            for t, a in getattr(self, name.lower()):
                per.setdefault(t, set()).add(a)
            index[name] = {t: frozenset(v) for t, v in per.items()}
        return index

    def family(self, component, trace):
        return self._by_trace[component.upper()].get(trace, frozenset())


def enumerate_bounded(l, k):
    ends = _end_states(l, k + 1)
    sigma = l.alphabet
    all_sets = _subsets(sigma)

    def diverges(states):
        return any(classify_state(l, s).divergent for s in states)

    div_all = {t for t, states in ends.items() if diverges(states)}
    mind_all = {t for t in div_all if not any(t[:i] in div_all for i in range(len(t)))}

    tr = frozenset(t for t in ends if len(t) <= k)
    dl = frozenset(
        t for t in tr if any(classify_state(l, s).deadlock for s in ends[t])
    )
    div = frozenset(t for t in div_all if len(t) <= k)
    mind = frozenset(t for t in mind_all if len(t) <= k)
    every = [t for n in range(k + 1) for t in product(sorted(sigma), repeat=n)]
    extt = frozenset(t for t in every if any(t[:i] in mind_all for i in range(len(t) + 1)))
    ant = tr - extt

    sf = set()
    for t in tr:
        for s in ends[t]:
            if classify_state(l, s).stable:
                enabled = {b for b, _ in l.succ[s]}
                sf.update((t, a) for a in all_sets if not a & enabled)
    sf = frozenset(sf)
    nf = frozenset((t, a) for t, a in sf if t not in div_all)
    snf = frozenset(
        (t, a) for t, a in nf if all(t + (x,) not in div_all for x in a)
    )
    anf = frozenset((t, a) for t, a in sf if t not in extt)
    sanf = frozenset(
        (t, a) for t, a in anf if all(t + (x,) not in mind_all for x in a)
    )
    cfail = sf | frozenset((t, a) for t in extt for a in all_sets)
    return BoundedSemantics(
        depth=k, alphabet=sigma, tr=tr, dl=dl, div=div, mind=mind, extt=extt,
        ant=ant, sf=sf, nf=nf, snf=snf, anf=anf, sanf=sanf, cfail=cfail, cdiv=extt,
    )


# cross-validation ------------------------------------------------------------


@dataclass
class CrosscheckReport:
    passed: bool
    checked: int
    mismatch: dict = None

    def as_dict(self):
        return {"passed": self.passed, "checked": self.checked, "mismatch": self.mismatch}


def _closure(antichain, all_sets):
    return frozenset(a for a in all_sets if any(a <= r for r in antichain))


def crosscheck(l, k, nf=None):
    """Compare the oracle with the normal-form views on every trace up to ``k``."""
    from .normalform import normalize
    from .semantics import Component, observe, walk

    if nf is None:
        nf = normalize(l, with_history=True)
    sem = enumerate_bounded(l, k)
    all_sets = _subsets(l.alphabet)
    comps = [(name, Component(name)) for name in BIT_COMPONENTS + REFUSAL_COMPONENTS]
    checked = 0
    for n in range(k + 1):
        for trace in product(sorted(l.alphabet), repeat=n):
            q = walk(nf, trace)
            for name, comp in comps:
                if name in BIT_COMPONENTS:
                    expected = sem.bit(name, trace)
                    got = observe(comp, nf, q)
                else:
                    expected = sem.family(name, trace)
                    got = _closure(observe(comp, nf, q), all_sets)
                checked += 1
                if expected != got:
                    return _fail(checked, trace, name, expected, got)
    return CrosscheckReport(True, checked)


def _show(v):
    if isinstance(v, frozenset):
        return sorted(sorted(a) for a in v)
    return v


def _fail(checked, trace, component, expected, got):
    return CrosscheckReport(
        False,
        checked,
        {
            "trace": list(trace),
            "component": component,
            "oracle": _show(expected),
            "symbolic": _show(got),
        },
    )


# random generation -----------------------------------------------------------


@dataclass(frozen=True)
class GenParams:
    """Parameters of :func:`random_lts`.

    :param states: number of states
    :param actions: size of the visible alphabet
    :param density: expected outgoing transitions per state
    :param tau: probability that a transition is invisible
    :param seed: random seed
    """

    states: int = 4
    actions: int = 2
    density: float = 1.5
    tau: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.states < 1 or self.actions < 0 or self.density < 0:
            raise ValueError("counts must be non-negative and at least one state")
        if not 0 <= self.tau <= 1:
            raise ValueError("tau probability must lie in [0, 1]")
        if self.actions > 26:
            raise ValueError("at most 26 visible actions")


def random_lts(p):
    rng = random.Random(p.seed)
    alphabet = list(string.ascii_lowercase[: p.actions])
    names = [f"s{i}" for i in range(p.states)]
    slots = 2 * int(p.density + 0.999)
    prob = p.density / slots if slots else 0.0
    trans = set()
    for s in range(p.states):
        for _ in range(slots):
            if rng.random() >= prob:
                continue
            if not alphabet or rng.random() < p.tau:
                label = TAU
            else:
                label = rng.choice(alphabet)
            trans.add((s, label, rng.randrange(p.states)))
    return Lts(tuple(names), frozenset(alphabet), frozenset(trans), 0)


def bisimilar_mutation(l, rng):
    """A structurally different LTS bisimilar to ``l``.

    Splits a random state into two copies with identical outgoing moves,
    redirects some incoming moves to the copy and adds an unreachable state.
    """
    n = l.size
    s = rng.randrange(n)
    copy = n
    trans = set(l.transitions)
    for src, a, dst in l.transitions:
        if src == s:
            trans.add((copy, a, dst if dst != s else copy if rng.random() < 0.5 else s))
    for src, a, dst in list(trans):
        if dst == s and src != copy and rng.random() < 0.5:
            trans.discard((src, a, dst))
            trans.add((src, a, copy))
    junk = n + 1
    labels = sorted(l.alphabet) + [TAU]
    trans.add((junk, rng.choice(labels), rng.randrange(n + 2)))
    names = l.names + (f"{l.names[s]}.copy", "unreached")
    order = list(range(n + 2))
    rng.shuffle(order)
    pos = {old: new for new, old in enumerate(order)}
    return Lts(
        tuple(names[old] for old in order),
        l.alphabet,
        frozenset((pos[a], x, pos[b]) for a, x, b in trans),
        pos[l.initial],
    )
