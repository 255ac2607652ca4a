"""Process expressions: parser and evaluator.

Grammar::

    expr   := NAME | const | prefix(ACT, expr) | hide(aset, expr)
            | rename(pairs, expr) | par(expr, expr) | ichoice(expr, expr)
            | tag(INT, expr) | untag(INT, expr)
            | tester_sf(trace, aset, aset) | tester_tr(trace, aset, aset)
            | tester_trace_loop(trace, ACT, aset)
    const  := (stop | run | rd | rdl)(aset) | lc
    aset   := { [ACT (, ACT)*] }
    pairs  := { [ACT -> ACT (, ACT -> ACT)*] }
    trace  := [ [ACT (, ACT)*] ]

The tester forms take the trace first and the tester alphabet last; the middle
argument is the refusal set, the loop actions and the fresh action respectively.
"""

import re
from dataclasses import dataclass

from . import operators as ops
from . import testers
from .lts import TAU, LtsError, reachable_part

_TOKENS = re.compile(r"\s*(->|[(){}\[\],]|[a-zA-Z0-9_.@]+)")


class ExprError(LtsError):
    pass


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Const:
    kind: str
    actions: frozenset = frozenset()


@dataclass(frozen=True)
class Prefix:
    action: str
    body: object


@dataclass(frozen=True)
class Hide:
    actions: frozenset
    body: object


@dataclass(frozen=True)
class Rename:
    pairs: frozenset
    body: object


@dataclass(frozen=True)
class Par:
    left: object
    right: object


@dataclass(frozen=True)
class IChoice:
    left: object
    right: object


@dataclass(frozen=True)
class Tag:
    direction: str
    index: int
    body: object


@dataclass(frozen=True)
class Tester:
    kind: str
    trace: tuple
    arg: object
    alphabet: frozenset


def _tokenize(text):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character at offset {pos}: {text[pos]!r}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ExprError("unexpected end of expression")
        if expected is not None and tok != expected:
            raise ExprError(f"expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def action(self):
        tok = self.take()
        if not re.fullmatch(r"[a-zA-Z0-9_.@]+", tok):
            raise ExprError(f"expected an action, got {tok!r}")
        if tok == TAU:
            raise ExprError("tau is not a visible action")
        return tok

    def seq(self, open_, close, item):
        self.take(open_)
        items = []
        if self.peek() != close:
            items.append(item())
            while self.peek() == ",":
                self.take()
                items.append(item())
        self.take(close)
        return items

    def aset(self):
        return frozenset(self.seq("{", "}", self.action))

    def trace(self):
        return tuple(self.seq("[", "]", self.action))

    def pair(self):
        a = self.action()
        self.take("->")
        return a, self.action()

    def integer(self):
        tok = self.take()
        if not tok.isdigit():
            raise ExprError(f"expected an integer, got {tok!r}")
        return int(tok)

    def expr(self):
        head = self.take()
        if head == "lc" and self.peek() != "(":
            return Const("lc")
        if self.peek() != "(":
            if not re.fullmatch(r"[a-zA-Z0-9_.@]+", head):
                raise ExprError(f"unexpected token {head!r}")
            return Ref(head)
        self.take("(")
        if head in ("stop", "run", "rd", "rdl"):
            node = Const(head, self.aset())
        elif head == "prefix":
            a = self.action()
            self.take(",")
            node = Prefix(a, self.expr())
        elif head == "hide":
            acts = self.aset()
            self.take(",")
            node = Hide(acts, self.expr())
        elif head == "rename":
            pairs = frozenset(self.seq("{", "}", self.pair))
            self.take(",")
            node = Rename(pairs, self.expr())
        elif head in ("par", "ichoice"):
            left = self.expr()
            self.take(",")
            right = self.expr()
            node = Par(left, right) if head == "par" else IChoice(left, right)
        elif head in ("tag", "untag"):
            i = self.integer()
            self.take(",")
            node = Tag("up" if head == "tag" else "down", i, self.expr())
        elif head in ("tester_sf", "tester_tr", "tester_trace_loop"):
            trace = self.trace()
            self.take(",")
            arg = self.action() if head == "tester_trace_loop" else self.aset()
            self.take(",")
            node = Tester(head, trace, arg, self.aset())
        else:
            raise ExprError(f"unknown operator {head!r}")
        self.take(")")
        return node


def parse_expr(text):
    p = _Parser(text)
    node = p.expr()
    if p.peek() is not None:
        raise ExprError(f"trailing input at {p.peek()!r}")
    return node


def eval_expr(e, env=None):
    """Evaluate bottom-up; every intermediate result is trimmed to its reachable part."""
    if env is None:
        env = {}
    if isinstance(e, str):
        e = parse_expr(e)
    match e:
        case Ref(name):
            if name not in env:
                raise ExprError(f"unresolved name {name!r}")
            out = env[name]
        case Const(kind, actions):
            out = ops.make_constant(kind, actions)
        case Prefix(a, body):
            out = ops.prefix(a, eval_expr(body, env))
        case Hide(actions, body):
            out = ops.hide(actions, eval_expr(body, env))
        case Rename(pairs, body):
            out = ops.rename(ops.RenameRelation(pairs), eval_expr(body, env))
        case Par(left, right):
            out = ops.parallel(eval_expr(left, env), eval_expr(right, env))
        case IChoice(left, right):
            out = ops.internal_choice(eval_expr(left, env), eval_expr(right, env))
        case Tag(direction, i, body):
            out = ops.retag(direction, i, eval_expr(body, env))
        case Tester("tester_sf", trace, refusal, alphabet):
            out = testers.tester_sf(trace, refusal, alphabet)
        case Tester("tester_tr", trace, loop, alphabet):
            out = testers.tester_tr(trace, alphabet, loop)
        case Tester("tester_trace_loop", trace, fresh, alphabet):
            out = testers.tester_trace_loop(trace, fresh, alphabet)
        case _:
            raise ExprError(f"not an expression: {e!r}")
    return reachable_part(out)
