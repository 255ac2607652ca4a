"""The twenty linear-time congruences of finite LTSs and how to check them."""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import networkx as nx

from .normalform import normalize
from .semantics import (
    COMPONENT_ORDER,
    HISTORY_COMPONENTS,
    Component,
    canonical_form,
    observe,
    step,
)

C = Component


@dataclass(frozen=True)
class Congruence:
    index: int
    name: str
    signature: frozenset
    region: str

    @property
    def needs_history(self):
        return bool(self.signature & HISTORY_COMPONENTS)

    def __str__(self):
        return self.name


def _cong(index, name, comps, region):
    return Congruence(index, name, frozenset(comps), region)


# regions: which of the deadlock, livelock and both-lock processes coincide
DL_IS_LL = "deadlock-is-livelock"
DL_IS_BL = "deadlock-is-bothlock"
ALL_DIFFERENT = "all-different"
LL_IS_BL = "livelock-is-bothlock"

S = C.SIGMA
CATALOGUE = (
    _cong(1, "dullest", (), DL_IS_LL),
    _cong(2, "alph", (S,), DL_IS_LL),
    _cong(3, "tr", (S, C.TR), DL_IS_LL),
    _cong(4, "sf", (S, C.SF), DL_IS_BL),
    _cong(5, "tr-sf", (S, C.TR, C.SF), DL_IS_BL),
    _cong(6, "sf-mind", (S, C.SF, C.MIND), ALL_DIFFERENT),
    _cong(7, "tr-sf-mind", (S, C.TR, C.SF, C.MIND), ALL_DIFFERENT),
    _cong(8, "cffd-fin", (S, C.SF, C.DIV), ALL_DIFFERENT),
    _cong(9, "ant-mind", (S, C.ANT, C.MIND), LL_IS_BL),
    _cong(10, "tr-mind", (S, C.TR, C.MIND), LL_IS_BL),
    _cong(11, "tr-div", (S, C.TR, C.DIV), LL_IS_BL),
    _cong(12, "sanf-mind", (S, C.SANF, C.MIND), LL_IS_BL),
    _cong(13, "tr-sanf-mind", (S, C.TR, C.SANF, C.MIND), LL_IS_BL),
    _cong(14, "tr-sanf-div", (S, C.TR, C.SANF, C.DIV), LL_IS_BL),
    _cong(15, "csp-fdi", (S, C.ANF, C.MIND), LL_IS_BL),
    _cong(16, "tr-anf-mind", (S, C.TR, C.ANF, C.MIND), LL_IS_BL),
    _cong(17, "tr-anf-div", (S, C.TR, C.ANF, C.DIV), LL_IS_BL),
    _cong(18, "snf-div", (S, C.SNF, C.DIV), LL_IS_BL),
    _cong(19, "anf-snf-div", (S, C.ANF, C.SNF, C.DIV), LL_IS_BL),
    _cong(20, "ndfd-fin", (S, C.NF, C.DIV), LL_IS_BL),
)

# the usual finite failures-divergences semantics of CSP, written directly
CSP_SIGNATURE = frozenset({S, C.CFAIL, C.CDIV})

# infinite-LTS congruences each finite one stands for; infinite-trace
# components are functions of the finite ones when the LTS is finite
INFINITE_FORMS = {
    1: ("dullest",),
    2: ("Sigma",),
    3: ("Sigma,Tr", "Sigma,Tr,Inf"),
    4: ("Sigma,Sf",),
    5: ("Sigma,Tr,Sf", "Sigma,Tr,Sf,Inf"),
    6: ("Sigma,Sf,minD,anI",),
    7: ("Sigma,Tr,Sf,minD,anI", "Sigma,Tr,Sf,minD,Inf"),
    8: ("Sigma,Sf,Div,eanI", "Sigma,Sf,Div,aenI", "Sigma,Sf,Div,Inf"),
    9: ("Sigma,anT,minD,anI",),
    10: ("Sigma,Tr,minD,anI", "Sigma,Tr,minD,Inf"),
    11: ("Sigma,Tr,Div,eanI", "Sigma,Tr,Div,aenI", "Sigma,Tr,Div,Inf"),
    12: ("Sigma,sanF,minD,anI",),
    13: ("Sigma,Tr,sanF,minD,anI", "Sigma,Tr,sanF,minD,Inf"),
    14: ("Sigma,Tr,sanF,Div,eanI", "Sigma,Tr,sanF,Div,aenI", "Sigma,Tr,sanF,Div,Inf"),
    15: ("Sigma,anF,minD,anI",),
    16: ("Sigma,Tr,anF,minD,anI", "Sigma,Tr,anF,minD,Inf"),
    17: ("Sigma,Tr,anF,Div,eanI", "Sigma,Tr,anF,Div,aenI", "Sigma,Tr,anF,Div,Inf"),
    18: ("Sigma,snF,Div,eanI", "Sigma,snF,Div,aenI", "Sigma,snF,Div,Inf"),
    19: ("Sigma,anF,snF,Div,eanI", "Sigma,anF,snF,Div,aenI", "Sigma,anF,snF,Div,Inf"),
    20: ("Sigma,nF,Div,eanI", "Sigma,nF,Div,aenI", "Sigma,nF,Div,Inf"),
}

_BY_KEY = {}
for _c in CATALOGUE:
    _BY_KEY[_c.index] = _c
    _BY_KEY[str(_c.index)] = _c
    _BY_KEY[_c.name] = _c


def lookup(key):
    if isinstance(key, Congruence):
        return key
    try:
        return _BY_KEY[key]
    except KeyError:
        raise KeyError(f"unknown congruence {key!r}") from None


# implication order ------------------------------------------------------------

SF_TR = "SF_TR"  # traces carrying some stable failure
NF_TR = "NF_TR"  # nondivergent traces

# (premises, conclusion): the premises determine the conclusion
RULES = (
    ({C.SF}, C.DL),
    ({C.SF}, SF_TR),
    ({C.DIV}, C.MIND),
    ({C.MIND}, C.EXTT),
    ({C.EXTT}, C.MIND),
    ({C.EXTT}, C.CDIV),
    ({C.CDIV}, C.EXTT),
    ({C.DIV, SF_TR}, C.TR),
    ({C.TR, C.EXTT}, C.ANT),
    ({SF_TR, C.EXTT}, C.ANT),
    ({C.ANF}, C.ANT),
    ({C.SANF}, C.ANT),
    ({C.SF, C.DIV}, C.NF),
    ({C.SF, C.EXTT}, C.ANF),
    ({C.NF}, NF_TR),
    ({C.SNF}, NF_TR),
    ({NF_TR, C.DIV}, C.TR),
    ({C.NF, C.DIV}, C.SNF),
    ({C.NF, C.EXTT}, C.ANF),
    ({C.SNF, C.EXTT}, C.SANF),
    ({C.ANF, C.EXTT}, C.SANF),
    ({C.ANF, C.EXTT}, C.CFAIL),
    ({C.SF, C.EXTT}, C.CFAIL),
    ({C.CFAIL, C.CDIV}, C.ANF),
)


@lru_cache(maxsize=None)
def _closure(components):
    known = set(components)
    changed = True
    while changed:
        changed = False
        for premises, conclusion in RULES:
            if conclusion not in known and premises <= known:
                known.add(conclusion)
                changed = True
    return frozenset(known)


def derivable(components):
    """Closure of a component set under the derivation rules."""
    return _closure(frozenset(components))


def implies(c1, c2):
    """Whether equality under ``c1`` always entails equality under ``c2``."""
    c1, c2 = lookup(c1), lookup(c2)
    return c2.signature <= derivable(c1.signature)


@lru_cache(maxsize=1)
def implication_graph():
    g = nx.DiGraph()
    g.add_nodes_from(c.index for c in CATALOGUE)
    for c1 in CATALOGUE:
        for c2 in CATALOGUE:
            if c1 != c2 and implies(c1, c2):
                g.add_edge(c1.index, c2.index)
    return g


def hasse_edges():
    """Covering pairs ``(stronger, weaker)`` of the implication order."""
    return tuple(sorted(nx.transitive_reduction(implication_graph()).edges()))


def minimal_elements(ids):
    """Weakest members: not implied-from-above by another member."""
    ids = set(ids)
    return sorted(i for i in ids if not any(j != i and implies(i, j) for j in ids))


def maximal_elements(ids):
    ids = set(ids)
    return sorted(i for i in ids if not any(j != i and implies(j, i) for j in ids))


# verdicts ---------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    component: Component
    trace: tuple
    detail: str
    refusal: frozenset = None
    present_in: str = None

    def as_dict(self):
        d = {"component": str(self.component), "trace": list(self.trace), "detail": self.detail}
        if self.refusal is not None:
            d["refusal"] = sorted(self.refusal)
        if self.present_in is not None:
            d["present_in"] = self.present_in
        return d

    def describe(self):
        trace = " ".join(self.trace) if self.trace else "eps"
        text = f"{self.component} at [{trace}]: {self.detail}"
        if self.refusal is not None:
            text += " {" + ",".join(sorted(self.refusal)) + "}"
        if self.present_in is not None:
            text += f" only in {self.present_in}"
        return text


@dataclass(frozen=True)
class Verdict:
    congruence: Congruence
    equal: bool
    witness: Witness = None

    def as_dict(self):
        return {
            "id": self.congruence.index,
            "name": self.congruence.name,
            "equal": self.equal,
            "witness": None if self.witness is None else self.witness.as_dict(),
        }


TRACE_DETAIL = "trace-membership mismatch"
DIV_DETAIL = "divergence bit mismatch"
REFUSAL_DETAIL = "refusal set present in exactly one side"
ALPHABET_DETAIL = "alphabet difference"


def _uncovered(f1, f2):
    """Maximal refusals of ``f1`` lying outside the downward closure of ``f2``."""
    return sorted(
        (r for r in f1 if not any(r <= x for x in f2)), key=lambda r: (len(r), sorted(r))
    )


def _witness(c, trace, v1, v2):
    if c in (C.TR, C.ANT):
        return Witness(c, trace, TRACE_DETAIL, present_in="left" if v1 else "right")
    if c in (C.DIV, C.MIND, C.EXTT, C.CDIV):
        return Witness(c, trace, DIV_DETAIL, present_in="left" if v1 else "right")
    if c == C.DL:
        return Witness(c, trace, REFUSAL_DETAIL, None, "left" if v1 else "right")
    left = _uncovered(v1, v2)
    if left:
        return Witness(c, trace, REFUSAL_DETAIL, left[0], "left")
    return Witness(c, trace, REFUSAL_DETAIL, _uncovered(v2, v1)[0], "right")


def _alphabet_witness():
    return Witness(C.SIGMA, (), ALPHABET_DETAIL)


def _normal_forms(l1, l2, history):
    return normalize(l1, with_history=history), normalize(l2, with_history=history)


def compare(signatures, nf1, nf2):
    """Synchronized breadth-first traversal of two completed normal forms.

    ``signatures`` maps keys to component sets.  Returns, per key, ``None`` if
    no reachable pair differs on those components, else the witness at the
    shortlex-least differing trace.
    """
    sigs = {k: tuple(c for c in COMPONENT_ORDER if c in v) for k, v in signatures.items()}
    result = {}
    if nf1.alphabet != nf2.alphabet:
        for k, comps in sigs.items():
            if C.SIGMA in signatures[k]:
                result[k] = _alphabet_witness()
    pending = {k: comps for k, comps in sigs.items() if k not in result and comps}
    for k in sigs:
        result.setdefault(k, None)
    if not pending:
        return result
    needed = tuple(c for c in COMPONENT_ORDER if any(c in v for v in pending.values()))
    actions = sorted(nf1.alphabet | nf2.alphabet)
    start = (0, 0)
    parent = {start: None}
    queue = deque([start])
    while queue and pending:
        pair = queue.popleft()
        q1, q2 = pair
        diff = set()
        values = {}
        for c in needed:
            v1, v2 = observe(c, nf1, q1), observe(c, nf2, q2)
            if v1 != v2:
                diff.add(c)
                values[c] = (v1, v2)
        if diff:
            trace = _trace(parent, pair)
            for k in list(pending):
                for c in pending[k]:
                    if c in diff:
                        result[k] = _witness(c, trace, *values[c])
                        del pending[k]
                        break
        if q1 < 0 and q2 < 0:
            continue
        for a in actions:
            nxt = (step(nf1, q1, a), step(nf2, q2, a))
            if nxt not in parent:
                parent[nxt] = (pair, a)
                queue.append(nxt)
    return result


def _trace(parent, pair):
    out = []
    while parent[pair] is not None:
        pair, a = parent[pair]
        out.append(a)
    return tuple(reversed(out))


def equivalent(c, l1, l2, nfs=None):
    c = lookup(c)
    if not c.signature:
        return Verdict(c, True)
    if l1.alphabet != l2.alphabet:
        return Verdict(c, False, _alphabet_witness())
    nf1, nf2 = nfs if nfs is not None else _normal_forms(l1, l2, c.needs_history)
    w = compare({c.index: c.signature}, nf1, nf2)[c.index]
    return Verdict(c, w is None, w)


def verdict_table(l1, l2, nfs=None):
    """One verdict per congruence, sharing normal forms and a single traversal."""
    if nfs is None:
        nfs = _normal_forms(l1, l2, True)
    if l1.alphabet != l2.alphabet:
        found = {c.index: (_alphabet_witness() if c.signature else None) for c in CATALOGUE}
    else:
        found = compare({c.index: c.signature for c in CATALOGUE}, *nfs)
    return [Verdict(c, found[c.index] is None, found[c.index]) for c in CATALOGUE]


def equal_ids(table):
    return [v.congruence.index for v in table if v.equal]


def minimal_distinguishing(l1, l2, table=None):
    table = table or verdict_table(l1, l2)
    return minimal_elements(v.congruence.index for v in table if not v.equal)


def maximal_equating(l1, l2, table=None):
    table = table or verdict_table(l1, l2)
    return maximal_elements(v.congruence.index for v in table if v.equal)


def canonical_key(c, nf):
    """Equal keys exactly when the normal forms are equal under ``c``."""
    c = lookup(c)
    if not c.signature:
        return None
    return canonical_form(c.signature, nf)


def csp_equal(l1, l2):
    """Equality of alphabet, chaotically closed failures and divergences."""
    if l1.alphabet != l2.alphabet:
        return False
    nf1, nf2 = _normal_forms(l1, l2, True)
    return compare({0: CSP_SIGNATURE}, nf1, nf2)[0] is None


def lattice_query(kind, *args):
    if kind == "hasse_edges":
        return hasse_edges()
    if kind == "implies":
        return implies(*args)
    if kind == "minimal_distinguishing":
        return minimal_distinguishing(*args)
    if kind == "maximal_equating":
        return maximal_equating(*args)
    raise ValueError(f"unknown lattice query {kind!r}")


def lattice_dot():
    lines = ["digraph congruences {", "  rankdir=BT;", "  node [shape=box];"]
    for c in CATALOGUE:
        lines.append(f'  c{c.index} [label="{c.index} {c.name}"];')
    for a, b in hasse_edges():
        lines.append(f"  c{b} -> c{a};")
    lines.append("}")
    return "\n".join(lines) + "\n"
