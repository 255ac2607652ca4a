"""Determinization and annotated normal forms.

A normal form is the subset-construction automaton of an LTS: deterministic,
tau-free, every state reachable.  Each state may carry

* ``divergent``: some member state can diverge,
* ``refusals``: the maximal refusal sets of its stable members (an antichain),
* ``history``: where the traces reaching it stand relative to divergence:
  ``pre`` (no prefix diverges), ``min`` (the trace itself is the first to
  diverge) or ``post`` (a proper prefix already diverged).

``min`` and ``post`` together form the extensions of minimal divergence traces.
"""

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .lts import TAU, Lts, bisim_quotient

PRE, MIN, POST = "pre", "min", "post"


def maximalize(sets):
    """Keep only the sets not strictly contained in another."""
    sets = set(sets)
    return frozenset(s for s in sets if not any(s < t for t in sets))


def downward_contains(antichain, refusal):
    return any(refusal <= r for r in antichain)


@dataclass(frozen=True)
class NormalForm:
    """Deterministic tau-free automaton with optional per-state annotations.

    :param alphabet: visible actions
    :param delta: per state, sorted ``(action, target)`` pairs
    :param divergent: per state divergence bit, or ``None``
    :param refusals: per state antichain of maximal refusals, or ``None``
    :param history: per state ``pre``/``min``/``post``, or ``None``
    :param subsets: per state, names of the source states it stands for
    """

    alphabet: frozenset
    delta: tuple
    divergent: tuple = None
    refusals: tuple = None
    history: tuple = None
    subsets: tuple = None

    initial = 0

    @property
    def size(self):
        return len(self.delta)

    @property
    def actions(self):
        return tuple(sorted(self.alphabet))

    @cached_property
    def step(self):
        return tuple(dict(moves) for moves in self.delta)

    def run(self, trace, start=0):
        """State reached by ``trace``, or ``None``."""
        q = start
        for a in trace:
            q = self.step[q].get(a)
            if q is None:
                return None
        return q

    @property
    def annotated(self):
        return self.divergent is not None

    @cached_property
    def divergent_successors(self):
        """Per state, actions leading to a divergent state."""
        return tuple(
            frozenset(a for a, t in moves if self.divergent[t]) for moves in self.delta
        )

    def hist_label(self, q):
        if self.history is None:
            return "-"
        return PRE if self.history[q] == PRE else POST


def _masks(l):
    """Bitmask tau-closures and per-action successor closures."""
    closure = [0] * l.size
    for s in range(l.size):
        m = 0
        for t in l.tau_closure([s]):
            m |= 1 << t
        closure[s] = m
    after = {a: [0] * l.size for a in l.alphabet}
    for s, a, t in l.transitions:
        if a != TAU:
            after[a][s] |= closure[t]
    return closure, after


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _subset_automaton(l, with_history):
    closure, after = _masks(l)
    actions = sorted(l.alphabet)
    divmask = sum(1 << s for s in range(l.size) if l.divergent[s])
    start_mask = closure[l.initial]
    if with_history:
        start = (start_mask, MIN if start_mask & divmask else PRE)
    else:
        start = (start_mask, None)
    index = {start: 0}
    keys = [start]
    delta = []
    queue = deque([start])
    step_cache = {}
    while queue:
        key = queue.popleft()
        mask, h = key
        moves = []
        for a in actions:
            ck = (mask, a)
            nxt = step_cache.get(ck)
            if nxt is None:
                nxt = 0
                row = after[a]
                for s in _bits(mask):
                    nxt |= row[s]
                step_cache[ck] = nxt
            if not nxt:
                continue
            if h is None:
                nh = None
            elif h == PRE:
                nh = MIN if nxt & divmask else PRE
            else:
                nh = POST
            target = (nxt, nh)
            if target not in index:
                index[target] = len(keys)
                keys.append(target)
                queue.append(target)
            moves.append((a, index[target]))
        delta.append(tuple(moves))
    return keys, tuple(delta), divmask


def determinize(l):
    keys, delta, _ = _subset_automaton(l, False)
    subsets = tuple(frozenset(l.names[s] for s in _bits(m)) for m, _ in keys)
    return NormalForm(l.alphabet, delta, subsets=subsets)


def normalize(l, with_history=True, quotient=True):
    """Subset construction annotated with divergence, refusals and history."""
    if quotient:
        l = bisim_quotient(l)
    keys, delta, divmask = _subset_automaton(l, with_history)
    refusal_of = {}
    for s in range(l.size):
        if l.stable[s]:
            refusal_of[s] = l.alphabet - l.initials(s)
    cache = {}
    refusals = []
    for m, _ in keys:
        r = cache.get(m)
        if r is None:
            r = maximalize(refusal_of[s] for s in _bits(m) if s in refusal_of)
            cache[m] = r
        refusals.append(r)
    return NormalForm(
        l.alphabet,
        delta,
        divergent=tuple(bool(m & divmask) for m, _ in keys),
        refusals=tuple(refusals),
        history=tuple(h for _, h in keys) if with_history else None,
        subsets=tuple(frozenset(l.names[s] for s in _bits(m)) for m, _ in keys),
    )


def as_lts(nf):
    names = tuple(f"d{q}" for q in range(nf.size))
    trans = frozenset((q, a, t) for q, moves in enumerate(nf.delta) for a, t in moves)
    return Lts(names, nf.alphabet, trans, 0)


def una(l):
    """Product of ``l`` with its own determinization; bisimilar to ``l``."""
    from .operators import parallel

    return parallel(l, as_lts(determinize(l)))


def pd(l):
    """Unambiguation refined by whether the trace so far avoids divergence."""
    keys, delta, divmask = _subset_automaton(l, False)
    det = [dict(m) for m in delta]

    def bit(q):
        return POST if keys[q][0] & divmask else PRE

    start = (l.initial, 0, bit(0))
    index = {start: 0}
    order = [start]
    trans = set()
    queue = deque([start])
    while queue:
        state = queue.popleft()
        s, q, x = state
        for a, t in l.succ[s]:
            if a == TAU:
                target = (t, q, x)
            else:
                nq = det[q][a]
                target = (t, nq, POST if x == POST else bit(nq))
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            trans.add((index[state], a, index[target]))
    names = tuple(f"s{s}_d{q}_{x}" for s, q, x in order)
    return Lts(names, l.alphabet, frozenset(trans), 0)


def full_observation(nf, q):
    return (
        None if nf.divergent is None else nf.divergent[q],
        None if nf.refusals is None else nf.refusals[q],
        None if nf.history is None else nf.history[q],
    )


def coarsest_refinement(nf, obs):
    """Block per state of the coarsest transition-respecting refinement of ``obs``."""
    ids = {}
    block = [ids.setdefault(obs(q), len(ids)) for q in range(nf.size)]
    count = len(ids)
    while True:
        sigs = {}
        new = [
            sigs.setdefault(
                (block[q], tuple((a, block[t]) for a, t in nf.delta[q])), len(sigs)
            )
            for q in range(nf.size)
        ]
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def rebuild(nf, rep_of, keep=None):
    """Renumber by BFS from the initial state.

    ``rep_of`` maps each state to its representative; transitions into states
    with ``keep`` false are dropped.
    """
    start = rep_of[0]
    index = {start: 0}
    order = [start]
    delta = []
    queue = deque([start])
    while queue:
        q = queue.popleft()
        moves = []
        for a, t in nf.delta[q]:
            if keep is not None and not keep[t]:
                continue
            t = rep_of[t]
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
            moves.append((a, index[t]))
        delta.append(tuple(moves))

    def pick(field):
        return None if field is None else tuple(field[q] for q in order)

    return NormalForm(
        nf.alphabet,
        tuple(delta),
        divergent=pick(nf.divergent),
        refusals=pick(nf.refusals),
        history=pick(nf.history),
        subsets=None,
    )


def minimize_normal_form(nf, obs=None):
    """Merge states with equal ``obs`` and equivalent futures; language is preserved."""
    if obs is None:
        obs = lambda q: full_observation(nf, q)  # noqa: E731
    block = coarsest_refinement(nf, obs)
    rep = {}
    for q in range(nf.size):
        rep.setdefault(block[q], q)
    return rebuild(nf, [rep[block[q]] for q in range(nf.size)])


# export ----------------------------------------------------------------------


def _fmt_set(s):
    return "{" + ",".join(sorted(s)) + "}"


def _refusal_list(r):
    return sorted(sorted(x) for x in r)


def to_dict(nf):
    states = []
    for q in range(nf.size):
        entry = {"id": q, "delta": {a: t for a, t in nf.delta[q]}}
        if nf.divergent is not None:
            entry["divergent"] = nf.divergent[q]
        if nf.refusals is not None:
            entry["refusals"] = _refusal_list(nf.refusals[q])
        if nf.history is not None:
            entry["history"] = nf.hist_label(q)
            entry["min_divergence"] = nf.history[q] == MIN
        if nf.subsets is not None:
            entry["subset"] = sorted(nf.subsets[q])
        states.append(entry)
    return {"alphabet": sorted(nf.alphabet), "initial": nf.initial, "states": states}


def to_json(nf):
    return json.dumps(to_dict(nf), sort_keys=True, indent=2) + "\n"


def to_dot(nf, name="normalform"):
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box];"]
    for q in range(nf.size):
        div = "-" if nf.divergent is None else str(int(nf.divergent[q]))
        if nf.refusals is None:
            ref = "-"
        else:
            ref = "{" + ",".join(_fmt_set(r) for r in sorted(nf.refusals[q], key=sorted)) + "}"
        label = f"{q} | div:{div} | refusals:{ref} | hist:{nf.hist_label(q)}"
        lines.append(f'  q{q} [label="{label}"];')
    lines.append('  start [shape=point];')
    lines.append("  start -> q0;")
    for q in range(nf.size):
        for a, t in nf.delta[q]:
            lines.append(f'  q{q} -> q{t} [label="{a}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
