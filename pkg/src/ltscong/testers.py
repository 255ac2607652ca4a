"""Finite tester LTSs that turn semantic questions into deadlock/divergence checks."""

from .lts import TAU, Lts, LtsError


def _check(trace, actions, alphabet):
    alphabet = frozenset(alphabet)
    if TAU in alphabet:
        raise LtsError("tau in tester alphabet")
    missing = (set(trace) | set(actions)) - alphabet
    if missing:
        raise LtsError(f"tester actions outside alphabet: {sorted(missing)}")
    return alphabet


def tester_sf(trace, refusal, alphabet):
    """Deadlocks after ``trace`` exactly when the partner refuses ``refusal``.

    Every chain state carries a tau-loop so the product cannot deadlock early;
    after the chain a tau-step leads to a stable state offering ``refusal``,
    each offer leading to a tau-looping sink.
    """
    alphabet = _check(trace, refusal, alphabet)
    n = len(trace)
    trans = [(f"t{i}", TAU, f"t{i}") for i in range(n + 1)]
    trans += [(f"t{i}", b, f"t{i + 1}") for i, b in enumerate(trace)]
    trans.append((f"t{n}", TAU, "u"))
    if refusal:
        trans += [("u", a, "w") for a in sorted(refusal)]
        trans.append(("w", TAU, "w"))
    return Lts.build(alphabet, trans, "t0", ["u"])


def tester_tr(trace, alphabet, loop):
    """Chain over ``trace`` with tau-loops everywhere and ``loop`` actions at the end."""
    alphabet = _check(trace, (), alphabet)
    loop = frozenset(loop)
    if TAU in loop:
        raise LtsError("tau in loop alphabet")
    n = len(trace)
    trans = [(f"t{i}", TAU, f"t{i}") for i in range(n + 1)]
    trans += [(f"t{i}", b, f"t{i + 1}") for i, b in enumerate(trace)]
    trans += [(f"t{n}", a, f"t{n}") for a in sorted(loop)]
    return Lts.build(alphabet | loop, trans, "t0")


def trace_detector(l, trace, loop):
    """Compose ``l`` with a trace tester so that only ``loop`` actions stay visible.

    The result has traces ``loop*`` (all divergent) if ``trace`` is a trace of
    ``l`` and only the empty trace otherwise.
    """
    from .operators import hide, parallel, retag, tagged

    up = retag("up", 1, l)
    tester = tester_tr(
        [tagged(a, 1) for a in trace],
        up.alphabet,
        [tagged(a, 2) for a in loop],
    )
    return retag("down", 2, hide(up.alphabet, parallel(tester, up)))


def tester_trace_loop(trace, fresh, alphabet):
    """Chain over ``trace`` followed by ``fresh`` into a tau-looping state.

    In a product with ``l``, ``trace + fresh`` is a divergence trace exactly
    when ``trace`` is a trace of ``l``; the chain itself never diverges.
    """
    alphabet = _check(trace, (), alphabet)
    if fresh in alphabet or fresh == TAU:
        raise LtsError(f"{fresh} must be a fresh visible action")
    n = len(trace)
    trans = [(f"t{i}", b, f"t{i + 1}") for i, b in enumerate(trace)]
    trans += [(f"t{n}", fresh, "z"), ("z", TAU, "z")]
    return Lts.build(alphabet | {fresh}, trans, "t0")
