"""Semantic components as per-state views over an annotated normal form.

Every component is a function from traces to an observation.  On a normal form
the observation only depends on the state the trace reaches, so each component
is a per-state view.  Traces the automaton cannot execute reach one of two
virtual sink states: ``BOT_PRE`` when no prefix diverged and ``BOT_EXT`` when
the trace extends a minimal divergence trace.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import product

from .normalform import MIN, POST, PRE, maximalize, normalize

BOT_PRE = -1
BOT_EXT = -2

EMPTY = frozenset()


class Component(str, Enum):
    SIGMA = "SIGMA"
    TR = "TR"
    DL = "DL"
    DIV = "DIV"
    MIND = "MIND"
    EXTT = "EXTT"
    ANT = "ANT"
    SF = "SF"
    NF = "NF"
    SNF = "SNF"
    ANF = "ANF"
    SANF = "SANF"
    CFAIL = "CFAIL"
    CDIV = "CDIV"

    def __str__(self):
        return self.value


C = Component

# order in which a differing component is reported
COMPONENT_ORDER = (
    C.TR, C.DIV, C.MIND, C.EXTT, C.CDIV, C.ANT, C.DL,
    C.SF, C.NF, C.SNF, C.ANF, C.SANF, C.CFAIL,
)
BIT_COMPONENTS = frozenset({C.TR, C.DL, C.DIV, C.MIND, C.EXTT, C.ANT, C.CDIV})
HISTORY_COMPONENTS = frozenset({C.MIND, C.EXTT, C.ANT, C.ANF, C.SANF, C.CFAIL, C.CDIV})


class MissingAnnotation(ValueError):
    pass


def _require(c, nf):
    if nf.divergent is None:
        raise MissingAnnotation("normal form has no annotations")
    if c in HISTORY_COMPONENTS and nf.history is None:
        raise MissingAnnotation(f"{c} needs a history-refined normal form")


def observe(c, nf, q):
    """Observation of component ``c`` at state ``q`` (a real state or a sink)."""
    if q < 0:
        ext = q == BOT_EXT
        if c in (C.EXTT, C.CDIV):
            return ext
        if c == C.CFAIL:
            return frozenset({nf.alphabet}) if ext else EMPTY
        return False if c in BIT_COMPONENTS else EMPTY
    div = nf.divergent[q]
    if c == C.TR:
        return True
    if c == C.DIV:
        return div
    if c == C.SF:
        return nf.refusals[q]
    if c == C.DL:
        return nf.alphabet in nf.refusals[q]
    if c == C.NF:
        return EMPTY if div else nf.refusals[q]
    if c == C.SNF:
        if div:
            return EMPTY
        return _subtract(nf.refusals[q], nf.divergent_successors[q])
    h = nf.history[q]
    if c == C.MIND:
        return h == MIN
    if c in (C.EXTT, C.CDIV):
        return h != PRE
    if c == C.ANT:
        return h == PRE
    if c == C.ANF:
        return nf.refusals[q] if h == PRE else EMPTY
    if c == C.SANF:
        if h != PRE:
            return EMPTY
        return _subtract(nf.refusals[q], nf.divergent_successors[q])
    if c == C.CFAIL:
        return nf.refusals[q] if h == PRE else frozenset({nf.alphabet})
    raise ValueError(f"no per-state view for {c}")


def _subtract(antichain, actions):
    if not actions:
        return antichain
    return maximalize(r - actions for r in antichain)


def step(nf, q, a):
    """Completed transition function including the two sinks."""
    if q < 0:
        return q
    t = nf.step[q].get(a)
    if t is not None:
        return t
    if nf.history is not None and nf.history[q] != PRE:
        return BOT_EXT
    return BOT_PRE


def walk(nf, trace):
    q = 0
    for a in trace:
        q = step(nf, q, a)
    return q


def observation_at(c, nf, trace):
    if c == C.SIGMA:
        return nf.alphabet
    _require(c, nf)
    return observe(c, nf, walk(nf, trace))


@dataclass(frozen=True)
class ComponentView:
    """A component as a per-state observation over a normal form."""

    component: Component
    nf: object
    values: tuple = field(repr=False)

    def at(self, q):
        return self.values[q] if q >= 0 else observe(self.component, self.nf, q)

    def of_trace(self, trace):
        return self.at(walk(self.nf, trace))


def component_view(c, nf):
    c = Component(c)
    if c == C.SIGMA:
        raise ValueError("the alphabet is not a per-state view")
    _require(c, nf)
    return ComponentView(c, nf, tuple(observe(c, nf, q) for q in range(nf.size)))


def signature_observer(signature, nf):
    """Function mapping a (real or sink) state to its observation vector."""
    comps = tuple(c for c in COMPONENT_ORDER if c in signature)
    for c in comps:
        _require(c, nf)
    cache = {}

    def obs(q):
        v = cache.get(q)
        if v is None:
            v = tuple(observe(c, nf, q) for c in comps)
            cache[q] = v
        return v

    return obs


def observation_vector(signature, nf, q):
    return signature_observer(signature, nf)(q)


# completed automaton, trimming and canonical forms ---------------------------


def completed_blocks(signature, nf):
    """Coarsest transition-respecting partition of states and sinks.

    Returns ``(block, succ, sink_pre, sink_ext)``.  Sinks get the indices
    ``sink_pre`` and ``sink_ext`` after the real states; ``block[i]`` is the
    class of index ``i`` and ``succ[i]`` its successors in sorted action order.
    """
    obs = signature_observer(signature, nf)
    actions = nf.actions
    n = nf.size
    sp, se = n, n + 1
    sink_of = {BOT_PRE: sp, BOT_EXT: se}
    succ = []
    for q in range(n):
        row = []
        for a in actions:
            t = step(nf, q, a)
            row.append(sink_of[t] if t < 0 else t)
        succ.append(tuple(row))
    succ.append(tuple([sp] * len(actions)))
    succ.append(tuple([se] * len(actions)))
    ids = {}
    keys = [obs(q) for q in range(n)] + [obs(BOT_PRE), obs(BOT_EXT)]
    block = [ids.setdefault(k, len(ids)) for k in keys]
    count = len(ids)
    while True:
        sigs = {}
        new = [
            sigs.setdefault((block[q], tuple(block[t] for t in succ[q])), len(sigs))
            for q in range(n + 2)
        ]
        if len(sigs) == count:
            break
        block, count = new, len(sigs)
    return block, succ, sp, se


def trim_relevant(signature, nf):
    """Drop states whose whole future observes the same as an absent trace.

    A state is compared with the sink its missing transitions would lead to:
    ``BOT_EXT`` for states strictly after a minimal divergence trace,
    ``BOT_PRE`` otherwise.  The initial state is always kept.
    """
    from .normalform import rebuild

    block, _, sp, se = completed_blocks(signature, nf)
    keep = []
    for q in range(nf.size):
        sink = se if nf.history is not None and nf.history[q] == POST else sp
        keep.append(q == 0 or block[q] != block[sink])
    return rebuild(nf, list(range(nf.size)), keep)


def canonical_form(signature, nf):
    """Hashable canonical description of the per-trace observation function."""
    block, succ, _, _ = completed_blocks(signature, nf)
    obs = signature_observer(signature, nf)
    rep = {}
    for q in range(nf.size + 2):
        rep.setdefault(block[q], q)
    start = block[0]
    index = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        q = rep[b]
        row = []
        for t in succ[q]:
            tb = block[t]
            if tb not in index:
                index[tb] = len(order)
                order.append(tb)
            row.append(index[tb])
        sink_q = {nf.size: BOT_PRE, nf.size + 1: BOT_EXT}.get(q, q)
        rows.append((obs(sink_q), tuple(row)))
    alphabet = nf.alphabet if C.SIGMA in signature else None
    return alphabet, nf.actions if alphabet is not None else None, tuple(rows)


# trace listings --------------------------------------------------------------


def traces_upto(actions, depth):
    """All traces over ``actions`` of length at most ``depth`` in shortlex order."""
    actions = sorted(actions)
    for n in range(depth + 1):
        for t in product(actions, repeat=n):
            yield t


def trace_listing(c, nf, depth):
    """``(trace, observation)`` for every trace up to ``depth`` not observing as absent."""
    c = Component(c)
    _require(c, nf)
    bottom = observe(c, nf, BOT_PRE)
    out = []
    for t in traces_upto(nf.alphabet, depth):
        v = observe(c, nf, walk(nf, t))
        if v != bottom:
            out.append((t, v))
    return out


# bounded check of the infinite-trace classifications -------------------------


@dataclass
class LimitReport:
    passed: bool
    lassos: list
    counterexample: object = None


def _lts_sets(l, trace):
    """Source state sets reached along ``trace``, one per prefix (brute force)."""
    cur = l.tau_closure([l.initial])
    out = [cur]
    for a in trace:
        nxt = set()
        for s in cur:
            nxt.update(t for b, t in l.succ[s] if b == a)
        cur = l.tau_closure(nxt)
        out.append(cur)
    return out


def bounded_limit_check(l, k):
    """Check lasso-shaped infinite traces of the determinization up to size ``k``.

    For each lasso ``stem cycle^omega`` the symbolic classification read off
    the automaton states is compared with a direct computation on ``l`` over
    two unrollings of the cycle:

    * every prefix is a trace,
    * always nondivergent: no prefix diverges; symbolically every state on the
      lasso is nondivergent and ``pre``,
    * eventually always nondivergent: the cycle avoids divergent states,
    * infinitely often nondivergent: the cycle meets a nondivergent state.
    """
    if k < 1:
        raise ValueError("depth must be at least 1")
    nf = normalize(l, with_history=True, quotient=False)
    plain = normalize(l, with_history=False, quotient=False)
    lassos = []
    for total in range(1, k + 1):
        for word in product(nf.actions, repeat=total):
            for split in range(total):
                stem, cycle = word[:split], word[split:]
                q_stem = plain.run(stem)
                if q_stem is None or plain.run(cycle, q_stem) != q_stem:
                    continue
                if _is_power(cycle):
                    continue
                record = _classify(l, nf, plain, stem, cycle)
                lassos.append(record)
                if not record["agree"]:
                    return LimitReport(False, lassos, record)
    return LimitReport(True, lassos)


def _is_power(cycle):
    n = len(cycle)
    for d in range(1, n):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            return True
    return False


def _classify(l, nf, plain, stem, cycle):
    word = stem + cycle + cycle
    states = [0]
    q = 0
    for a in stem + cycle:
        q = plain.step[q][a]
        states.append(q)
    cyc_states = states[len(stem): len(stem) + len(cycle)]
    path = [nf.run(word[:i]) for i in range(len(stem) + len(cycle) + 1)]
    sym = {
        "always": all(not nf.divergent[q] and nf.history[q] == PRE for q in path),
        "eventually": all(not plain.divergent[s] for s in cyc_states),
        "infinitely": any(not plain.divergent[s] for s in cyc_states),
    }
    sets = _lts_sets(l, word)
    divs = [any(l.divergent[s] for s in S) for S in sets]
    tail = divs[len(stem) + len(cycle):]
    brute = {
        "always": not any(divs),
        "eventually": not any(tail),
        "infinitely": not all(tail),
    }
    in_tr = all(sets)
    return {
        "stem": stem,
        "cycle": cycle,
        "in_tr": in_tr,
        "symbolic": sym,
        "direct": brute,
        "agree": in_tr and sym == brute,
    }

