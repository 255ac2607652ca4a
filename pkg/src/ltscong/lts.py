"""Finite labelled transition systems.

States are dense integers ``0..n-1`` with a parallel tuple of printable names.
The invisible action is the label ``"tau"``.
"""

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property

TAU = "tau"

_TOKEN = re.compile(r"^[a-zA-Z0-9_.@]+$")


class LtsError(ValueError):
    """Raised for malformed LTS documents or invalid constructions."""


def is_token(text):
    return bool(_TOKEN.match(text))


@dataclass(frozen=True)
class StateClass:
    stable: bool
    deadlock: bool
    divergent: bool


@dataclass(frozen=True)
class Lts:
    """A labelled transition system ``(S, Sigma, Delta, s0)``.

    :param names: state names, indexed by state id
    :param alphabet: visible actions; never contains ``tau``
    :param transitions: triples ``(source, label, target)`` over state ids
    :param initial: id of the initial state
    """

    names: tuple
    alphabet: frozenset
    transitions: frozenset
    initial: int = 0

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise LtsError("an LTS needs at least one state")
        if len(set(self.names)) != n:
            raise LtsError("duplicate state names")
        if TAU in self.alphabet:
            raise LtsError("tau in alphabet")
        if not 0 <= self.initial < n:
            raise LtsError("initial state out of range")
        for src, label, dst in self.transitions:
            if not (0 <= src < n and 0 <= dst < n):
                raise LtsError(f"transition endpoint out of range: {src} {label} {dst}")
            if label != TAU and label not in self.alphabet:
                raise LtsError(f"undeclared action {label}")

    @classmethod
    def build(cls, alphabet, transitions, initial, states=()):
        """Build from named transitions ``(src_name, label, dst_name)``.

        State ids follow first appearance: ``initial``, then ``states``, then
        transition endpoints.
        """
        index = {}
        names = []

        def sid(name):
            if name not in index:
                index[name] = len(names)
                names.append(name)
            return index[name]

        sid(initial)
        for name in states:
            sid(name)
        trans = frozenset((sid(s), a, sid(t)) for s, a, t in transitions)
        return cls(tuple(names), frozenset(alphabet), trans, 0)

    @property
    def size(self):
        return len(self.names)

    @cached_property
    def succ(self):
        """Per state, the sorted list of ``(label, target)`` pairs."""
        out = [[] for _ in self.names]
        for src, label, dst in self.transitions:
            out[src].append((label, dst))
        return tuple(tuple(sorted(moves)) for moves in out)

    @cached_property
    def tau_succ(self):
        return tuple(tuple(t for a, t in moves if a == TAU) for moves in self.succ)

    @cached_property
    def divergent(self):
        """Per state, whether an infinite tau-path starts there."""
        return _divergent_states(self.tau_succ)

    @cached_property
    def stable(self):
        return tuple(not ts for ts in self.tau_succ)

    def initials(self, s):
        """Visible actions enabled at ``s``."""
        return frozenset(a for a, _ in self.succ[s] if a != TAU)

    def tau_closure(self, states):
        seen = set(states)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for t in self.tau_succ[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def state_id(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise LtsError(f"unknown state {name}") from None


def _tarjan(succ):
    """Strongly connected components of a graph given as adjacency tuples."""
    n = len(succ)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            edges = succ[v]
            while i < len(edges):
                w = edges[i]
                i += 1
                if index[w] is None:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def _divergent_states(tau_succ):
    n = len(tau_succ)
    cyclic = [False] * n
    for comp in _tarjan(tau_succ):
        if len(comp) > 1 or comp[0] in tau_succ[comp[0]]:
            for s in comp:
                cyclic[s] = True
    pred = [[] for _ in range(n)]
    for s, ts in enumerate(tau_succ):
        for t in ts:
            pred[t].append(s)
    div = list(cyclic)
    stack = [s for s in range(n) if cyclic[s]]
    while stack:
        t = stack.pop()
        for s in pred[t]:
            if not div[s]:
                div[s] = True
                stack.append(s)
    return tuple(div)


def classify_state(l, s):
    if isinstance(s, str):
        s = l.state_id(s)
    if not 0 <= s < l.size:
        raise LtsError(f"unknown state {s}")
    return StateClass(
        stable=l.stable[s], deadlock=not l.succ[s], divergent=l.divergent[s]
    )


# file format ---------------------------------------------------------------


def parse_lts(text):
    alphabet = None
    initial = None
    in_trans = False
    extra_states = []
    trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_trans and ":" not in line:
            parts = line.split()
            if len(parts) != 3 or not all(is_token(p) for p in parts):
                raise LtsError(f"line {lineno}: syntax error in transition")
            trans.append((lineno, *parts))
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        words = rest.split()
        if not sep:
            raise LtsError(f"line {lineno}: syntax error")
        for w in words:
            if not is_token(w):
                raise LtsError(f"line {lineno}: bad token {w!r}")
        if key == "alphabet":
            if alphabet is not None:
                raise LtsError(f"line {lineno}: alphabet declared twice")
            if TAU in words:
                raise LtsError(f"line {lineno}: tau in alphabet")
            if len(set(words)) != len(words):
                raise LtsError(f"line {lineno}: duplicate action in alphabet")
            alphabet = words
        elif key == "init":
            if initial is not None or len(words) != 1:
                raise LtsError(f"line {lineno}: init needs exactly one state")
            initial = words[0]
        elif key == "states":
            extra_states.extend(words)
        elif key == "trans":
            if words:
                raise LtsError(f"line {lineno}: syntax error after trans:")
            in_trans = True
        else:
            raise LtsError(f"line {lineno}: unknown section {key!r}")
    if alphabet is None:
        raise LtsError("missing alphabet")
    if initial is None:
        raise LtsError("missing init")
    declared = set(alphabet)
    for lineno, _, label, _ in trans:
        if label != TAU and label not in declared:
            raise LtsError(f"line {lineno}: undeclared action {label}")
    return Lts.build(alphabet, [t[1:] for t in trans], initial, extra_states)


def bfs_order(l):
    """State ids in first-visit BFS order under sorted labels, then unreachable."""
    seen = [False] * l.size
    order = [l.initial]
    seen[l.initial] = True
    queue = deque(order)
    while queue:
        s = queue.popleft()
        for _, t in l.succ[s]:
            if not seen[t]:
                seen[t] = True
                order.append(t)
                queue.append(t)
    reached = len(order)
    rest = sorted((s for s in range(l.size) if not seen[s]), key=lambda s: l.names[s])
    return order + rest, reached


def render_lts(l):
    order, reached = bfs_order(l)
    for name in l.names:
        if not is_token(name) or name == TAU:
            raise LtsError(f"state name {name!r} cannot be rendered")
    pos = {s: i for i, s in enumerate(order)}
    lines = ["alphabet:" + "".join(" " + a for a in sorted(l.alphabet))]
    lines.append(f"init: {l.names[l.initial]}")
    isolated = [
        s for s in order[reached:]
        if not any(src == s or dst == s for src, _, dst in l.transitions)
    ]
    if isolated:
        lines.append("states: " + " ".join(l.names[s] for s in isolated))
    lines.append("trans:")
    ordered = sorted(l.transitions, key=lambda t: (pos[t[0]], t[1], pos[t[2]]))
    for src, label, dst in ordered:
        lines.append(f"{l.names[src]} {label} {l.names[dst]}")
    return "\n".join(lines) + "\n"


# reachability and bisimulation -----------------------------------------------


def restrict(l, keep):
    """Sub-LTS on the state ids in ``keep`` (an ordered list containing the initial)."""
    pos = {s: i for i, s in enumerate(keep)}
    trans = frozenset(
        (pos[s], a, pos[t]) for s, a, t in l.transitions if s in pos and t in pos
    )
    return Lts(tuple(l.names[s] for s in keep), l.alphabet, trans, pos[l.initial])


def reachable_part(l):
    order, reached = bfs_order(l)
    if reached == l.size:
        return l
    return restrict(l, sorted(order[:reached]))


def _coarsest_partition(succ):
    """Block number per state for the coarsest strong bisimulation."""
    n = len(succ)
    block = [0] * n
    count = 1
    while True:
        sigs = {}
        new = [0] * n
        for s in range(n):
            sig = (block[s], frozenset((a, block[t]) for a, t in succ[s]))
            new[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def bisimilar(l1, l2, relation=False):
    """Strong bisimilarity with tau as an ordinary label.

    With ``relation=True`` returns ``(result, pairs)`` where ``pairs`` is the
    maximal bisimulation between reachable state names, or ``None``.
    """
    r1, r2 = reachable_part(l1), reachable_part(l2)
    if l1.alphabet != l2.alphabet:
        return (False, None) if relation else False
    off = r1.size
    succ = list(r1.succ) + [tuple((a, t + off) for a, t in moves) for moves in r2.succ]
    block = _coarsest_partition(succ)
    same = block[r1.initial] == block[r2.initial + off]
    if not relation:
        return same
    if not same:
        return False, None
    pairs = frozenset(
        (r1.names[s], r2.names[t])
        for s in range(r1.size)
        for t in range(r2.size)
        if block[s] == block[t + off]
    )
    return True, pairs


def bisim_quotient(l):
    r = reachable_part(l)
    block = _coarsest_partition(r.succ)
    order, _ = bfs_order(r)
    rep = {}
    for s in order:
        rep.setdefault(block[s], s)
    if len(rep) == r.size:
        return r
    ids = {b: i for i, b in enumerate(rep)}
    names = tuple(r.names[s] for s in rep.values())
    trans = frozenset((ids[block[s]], a, ids[block[t]]) for s, a, t in r.transitions)
    return Lts(names, r.alphabet, trans, ids[block[r.initial]])
