"""Process operators, constant LTSs and the tagging renamings."""

from collections import deque
from dataclasses import dataclass

from .lts import TAU, Lts, LtsError, reachable_part

TAG_MARK = "@"


@dataclass(frozen=True)
class RenameRelation:
    """Relational renaming. Actions outside the domain map to themselves."""

    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        for a, b in self.pairs:
            if TAU in (a, b):
                raise LtsError("tau in renaming relation")

    @property
    def domain(self):
        return frozenset(a for a, _ in self.pairs)

    @property
    def range(self):
        return frozenset(b for _, b in self.pairs)

    def image(self, a):
        if a == TAU:
            return (TAU,)
        if a in self.domain:
            return tuple(sorted(b for x, b in self.pairs if x == a))
        return (a,)


def _fresh_name(names, base):
    taken = set(names)
    if base not in taken:
        return base
    i = 0
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def prefix(a, l):
    if a == TAU:
        raise LtsError("prefix with tau is not an operator")
    init = _fresh_name(l.names, "p")
    names = l.names + (init,)
    new = len(l.names)
    trans = l.transitions | {(new, a, l.initial)}
    return Lts(names, l.alphabet | {a}, frozenset(trans), new)


def hide(actions, l):
    actions = frozenset(actions)
    if TAU in actions:
        raise LtsError("cannot hide tau")
    if not actions & l.alphabet:
        return l
    trans = frozenset(
        (s, TAU if a in actions else a, t) for s, a, t in l.transitions
    )
    return Lts(l.names, l.alphabet - actions, trans, l.initial)


def rename(phi, l):
    if not isinstance(phi, RenameRelation):
        phi = RenameRelation(frozenset(phi))
    if not phi.pairs:
        return l
    alphabet = frozenset(b for a in l.alphabet for b in phi.image(a))
    trans = frozenset(
        (s, b, t) for s, a, t in l.transitions for b in phi.image(a)
    )
    return Lts(l.names, alphabet, trans, l.initial)


def parallel(l1, l2):
    """Reachable part of the synchronous product; shared actions synchronize."""
    shared = l1.alphabet & l2.alphabet
    start = (l1.initial, l2.initial)
    index = {start: 0}
    order = [start]
    trans = set()
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        s1, s2 = pair
        src = index[pair]
        moves = []
        for a, t1 in l1.succ[s1]:
            if a in shared:
                moves.extend((a, (t1, t2)) for b, t2 in l2.succ[s2] if b == a)
            else:
                moves.append((a, (t1, s2)))
        for a, t2 in l2.succ[s2]:
            if a not in shared:
                moves.append((a, (s1, t2)))
        for a, target in sorted(moves):
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            trans.add((src, a, index[target]))
    names = tuple(f"s{a}_{b}" for a, b in order)
    return Lts(names, l1.alphabet | l2.alphabet, frozenset(trans), 0)


def internal_choice(l1, l2):
    """Fresh initial state with tau-moves into copies of both operands."""
    names = ["i"] + [f"l.{n}" for n in l1.names] + [f"r.{n}" for n in l2.names]
    off = 1 + l1.size
    trans = {(0, TAU, 1 + l1.initial), (0, TAU, off + l2.initial)}
    trans.update((1 + s, a, 1 + t) for s, a, t in l1.transitions)
    trans.update((off + s, a, off + t) for s, a, t in l2.transitions)
    return reachable_part(
        Lts(tuple(names), l1.alphabet | l2.alphabet, frozenset(trans), 0)
    )


def tagged(a, i):
    return f"{a}{TAG_MARK}{i}"


CHOICE_LEFT = tagged(1, 0)
CHOICE_RIGHT = tagged(2, 0)


def internal_choice_composed(l1, l2):
    """Internal choice built only from the four basic operators.

    A two-way controller synchronizes with one of two guarded, tagged copies;
    the guards are hidden and the tags removed afterwards.
    """
    ctrl = make_constant("lc")
    left = prefix(CHOICE_LEFT, retag("up", 1, l1))
    right = prefix(CHOICE_RIGHT, retag("up", 2, l2))
    system = hide({CHOICE_LEFT, CHOICE_RIGHT}, parallel(parallel(ctrl, left), right))
    phi = {(tagged(a, 1), a) for a in l1.alphabet}
    phi |= {(tagged(a, 2), a) for a in l2.alphabet}
    return rename(RenameRelation(frozenset(phi)), system)


def make_constant(kind, actions=()):
    actions = frozenset(actions)
    if TAU in actions:
        raise LtsError("tau in constant alphabet")
    loops = [("s0", a, "s0") for a in sorted(actions)]
    if kind == "stop":
        return Lts.build(actions, [], "s0")
    if kind == "run":
        return Lts.build(actions, loops, "s0")
    if kind == "rd":
        return Lts.build(actions, loops + [("s0", TAU, "s1")], "s0")
    if kind == "rdl":
        return Lts.build(
            actions, loops + [("s0", TAU, "s0"), ("s0", TAU, "s1")], "s0"
        )
    if kind == "lc":
        return Lts.build(
            {CHOICE_LEFT, CHOICE_RIGHT},
            [("s0", CHOICE_LEFT, "s1"), ("s0", CHOICE_RIGHT, "s1")],
            "s0",
        )
    raise LtsError(f"unknown constant {kind!r}")


def retag(direction, i, l):
    suffix = f"{TAG_MARK}{i}"
    if direction == "up":
        for a in l.alphabet:
            if a.endswith(suffix):
                raise LtsError(f"action {a} already carries tag {i}")
        phi = {(a, a + suffix) for a in l.alphabet}
    elif direction == "down":
        phi = {(a, a[: -len(suffix)]) for a in l.alphabet if a.endswith(suffix)}
        untouched = l.alphabet - {a for a, _ in phi}
        for a, b in phi:
            if not b or b in untouched:
                raise LtsError(f"untagging {a} collides with {b!r}")
    else:
        raise LtsError(f"unknown direction {direction!r}")
    return rename(RenameRelation(frozenset(phi)), l)


# named empty-alphabet processes
DLG = make_constant("stop")
LLG = Lts.build((), [("s0", TAU, "s0")], "s0")
BLG = Lts.build((), [("s0", TAU, "s0"), ("s0", TAU, "s1")], "s0")
