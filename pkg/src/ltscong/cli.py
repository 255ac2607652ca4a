"""Command-line front end."""

import argparse
import json
import sys
from pathlib import Path

from . import congruences as cg
from .expr import eval_expr, parse_expr
from .lts import LtsError, bisim_quotient, bisimilar, parse_lts, render_lts
from .normalform import minimize_normal_form, normalize, to_dot, to_json
from .oracle import GenParams, crosscheck, random_lts
from .semantics import Component, trace_listing


class UsageError(Exception):
    pass


# loading ---------------------------------------------------------------------


def _parse_binding(text):
    name, sep, path = text.partition("=")
    if not sep or not name:
        raise UsageError(f"--lts expects NAME=PATH, got {text!r}")
    return name, path


def _environment(args, base=None):
    env = {}
    if base is not None:
        for p in sorted(Path(base).glob("*.lts")):
            env[p.stem] = _LazyFile(p)
    for binding in getattr(args, "lts", None) or []:
        name, path = _parse_binding(binding)
        env[name] = _LazyFile(Path(path))
    return _Env(env)


class _LazyFile:
    def __init__(self, path):
        self.path = path

    def load(self):
        return parse_lts(self.path.read_text(encoding="utf-8"))


class _Env(dict):
    """Name lookup that parses referenced files on first use."""

    def __init__(self, files):
        super().__init__()
        self.files = files

    def __contains__(self, name):
        return name in self.files

    def __getitem__(self, name):
        if not dict.__contains__(self, name):
            dict.__setitem__(self, name, self.files[name].load())
        return dict.__getitem__(self, name)


def load(path, args=None):
    """Read an ``.lts`` file or evaluate a ``.pexp`` file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".pexp":
        body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
        return eval_expr(parse_expr(body), _environment(args, p.parent))
    return parse_lts(text)


# output ----------------------------------------------------------------------


def _write(args, text):
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_report(result, fmt):
    """Render a verdict table, lattice or crosscheck result."""
    kind = result["kind"]
    if fmt == "json":
        return _dump({k: v for k, v in result.items() if k != "kind"})
    if kind == "verdicts" and fmt == "text":
        lines = []
        for v in result["verdicts"]:
            status = "EQUAL" if v["equal"] else "DIFFER"
            line = f"{v['id']} {v['name']} {status}"
            if v["witness"] is not None:
                line += " " + _describe(v["witness"])
            lines.append(line)
        for key in ("minimal_distinguishing", "maximal_equating"):
            if key in result:
                lines.append(f"{key}: " + " ".join(result[key]))
        return "\n".join(lines) + "\n"
    if kind == "lattice" and fmt == "text":
        return "".join(f"{a} -> {b}\n" for a, b in result["hasse_edges"])
    if kind == "lattice" and fmt == "dot":
        return cg.lattice_dot()
    if kind == "crosscheck" and fmt == "text":
        lines = []
        for entry in result["results"]:
            status = "PASS" if entry["passed"] else "FAIL"
            line = f"{entry['source']} {status}"
            if entry["mismatch"]:
                line += " " + json.dumps(entry["mismatch"], sort_keys=True)
            lines.append(line)
        return "\n".join(lines) + "\n"
    raise UsageError(f"unsupported format {fmt!r} for {kind}")


def _describe(w):
    trace = " ".join(w["trace"]) if w["trace"] else "eps"
    text = f"{w['component']} [{trace}] {w['detail']}"
    if "refusal" in w:
        text += " {" + ",".join(w["refusal"]) + "}"
    if "present_in" in w:
        text += f" only-in:{w['present_in']}"
    return text


def _names(ids):
    return [cg.lookup(i).name for i in ids]


# commands --------------------------------------------------------------------


def cmd_validate(args):
    code = 0
    for path in args.files:
        try:
            l = load(path, args)
        except (LtsError, OSError) as e:
            print(f"{path}: error: {e}")
            code = 2
            continue
        print(
            f"{path}: ok states={l.size} actions={len(l.alphabet)} "
            f"transitions={len(l.transitions)}"
        )
    return code


def cmd_eval(args):
    if args.expr is None and args.file is None:
        raise UsageError("eval needs -e EXPR or a .pexp file")
    if args.expr is not None:
        l = eval_expr(parse_expr(args.expr), _environment(args, Path.cwd()))
    else:
        l = load(args.file, args)
    _write(args, render_lts(l))
    return 0


def cmd_normalize(args):
    l = load(args.file, args)
    nf = normalize(l, with_history=not args.no_history, quotient=not args.no_quotient)
    _write(args, to_dot(nf) if args.format == "dot" else to_json(nf))
    return 0


def cmd_sem(args):
    l = load(args.file, args)
    comp = Component(args.component.upper())
    nf = normalize(l)
    if args.format == "dot":
        _write(args, to_dot(nf))
        return 0
    rows = trace_listing(comp, nf, args.depth)
    if args.format == "json":
        out = [
            {"trace": list(t), "value": _plain(v)} for t, v in rows
        ]
        _write(args, _dump({"component": str(comp), "depth": args.depth, "entries": out}))
        return 0
    lines = []
    for t, v in rows:
        trace = " ".join(t) if t else "eps"
        if isinstance(v, bool):
            lines.append(trace)
        else:
            lines.append(f"{trace}\t" + " ".join(
                "{" + ",".join(r) + "}" for r in _plain(v)
            ))
    _write(args, "\n".join(lines) + ("\n" if lines else ""))
    return 0


def _plain(v):
    if isinstance(v, frozenset):
        return sorted(sorted(r) for r in v)
    return v


def _verdict_result(args, l1, l2, extra=True):
    table = cg.verdict_table(l1, l2)
    result = {
        "kind": "verdicts",
        "left": str(args.left),
        "right": str(args.right),
        "verdicts": [v.as_dict() for v in table],
    }
    if extra:
        result["minimal_distinguishing"] = _names(cg.minimal_distinguishing(l1, l2, table))
        result["maximal_equating"] = _names(cg.maximal_equating(l1, l2, table))
    return result


def cmd_eq(args):
    l1, l2 = load(args.left, args), load(args.right, args)
    try:
        c = cg.lookup(args.cong)
    except KeyError:
        raise UsageError(f"--cong: unknown congruence {args.cong!r}") from None
    v = cg.equivalent(c, l1, l2)
    if args.format == "text":
        status = "EQUAL" if v.equal else "DIFFER"
        line = f"{c.index} {c.name} {status}"
        if v.witness is not None:
            line += " " + _describe(v.witness.as_dict())
        _write(args, line + "\n")
    else:
        out = {"left": str(args.left), "right": str(args.right), **v.as_dict()}
        _write(args, _dump(out))
    return 0 if v.equal else 1


def cmd_distinguish(args):
    l1, l2 = load(args.left, args), load(args.right, args)
    _write(args, emit_report(_verdict_result(args, l1, l2), args.format))
    return 0


def cmd_lattice(args):
    if args.implies:
        try:
            a, b = (cg.lookup(x) for x in args.implies)
        except KeyError as e:
            raise UsageError(f"--implies: {e.args[0]}") from None
        print("true" if cg.implies(a, b) else "false")
        return 0
    fmt = "dot" if args.dot else args.format
    edges = [[cg.lookup(a).name, cg.lookup(b).name] for a, b in cg.hasse_edges()]
    result = {
        "kind": "lattice",
        "congruences": [
            {"id": c.index, "name": c.name, "signature": sorted(str(x) for x in c.signature),
             "region": c.region}
            for c in cg.CATALOGUE
        ],
        "hasse_edges": edges,
    }
    _write(args, emit_report(result, fmt))
    return 0


def cmd_bisim(args):
    l1, l2 = load(args.left, args), load(args.right, args)
    same = bisimilar(l1, l2)
    print("bisimilar" if same else "not bisimilar")
    return 0 if same else 1


def cmd_minimize(args):
    l = load(args.file, args)
    if args.cong is None:
        _write(args, render_lts(bisim_quotient(l)))
        return 0
    try:
        c = cg.lookup(args.cong)
    except KeyError:
        raise UsageError(f"--cong: unknown congruence {args.cong!r}") from None
    from .semantics import signature_observer, trim_relevant

    nf = normalize(l)
    nf = trim_relevant(c.signature, nf)
    nf = minimize_normal_form(nf, signature_observer(c.signature, nf))
    _write(args, to_dot(nf) if args.format == "dot" else to_json(nf))
    return 0


def cmd_random(args):
    p = GenParams(args.states, args.actions, args.density, args.tau, args.seed)
    _write(args, render_lts(random_lts(p)))
    return 0


def cmd_crosscheck(args):
    results = []
    for path in args.files:
        rep = crosscheck(load(path, args), args.depth)
        results.append({"source": str(path), **rep.as_dict()})
    for i in range(args.random):
        seed = args.seed + i
        p = GenParams(
            states=1 + seed % 8, actions=seed % 4, density=1.5, tau=0.3, seed=seed
        )
        rep = crosscheck(random_lts(p), args.depth)
        results.append({"source": f"random:{seed}", **rep.as_dict()})
    result = {"kind": "crosscheck", "depth": args.depth, "results": results}
    _write(args, emit_report(result, args.format))
    return 0 if all(r["passed"] for r in results) else 1


# parser ----------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ltscong", description="Linear-time congruences of finite LTSs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--lts", action="append", metavar="NAME=PATH",
                       help="bind a name for expressions")
        p.add_argument("--out", help="write output to this file")
        return p

    p = command("validate", cmd_validate, "parse and check files")
    p.add_argument("files", nargs="+")

    p = command("eval", cmd_eval, "evaluate a process expression")
    p.add_argument("-e", "--expr")
    p.add_argument("file", nargs="?")

    p = command("normalize", cmd_normalize, "print the annotated normal form")
    p.add_argument("file")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--dot", dest="format", action="store_const", const="dot")
    p.add_argument("--no-history", action="store_true")
    p.add_argument("--no-quotient", action="store_true")

    p = command("sem", cmd_sem, "list a semantic component")
    p.add_argument("file")
    p.add_argument("--component", "-c", required=True,
                   choices=[c.value for c in Component if c is not Component.SIGMA]
                   + [c.value.lower() for c in Component if c is not Component.SIGMA])
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--format", choices=["text", "json", "dot"], default="text")

    p = command("eq", cmd_eq, "check one congruence (exit 0 equal, 1 unequal)")
    p.add_argument("--cong", required=True)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = command("distinguish", cmd_distinguish, "verdicts under all 20 congruences")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = command("lattice", cmd_lattice, "the implication order")
    p.add_argument("--dot", action="store_true")
    p.add_argument("--format", choices=["json", "text", "dot"], default="json")
    p.add_argument("--implies", nargs=2, metavar=("C1", "C2"))

    p = command("bisim", cmd_bisim, "strong bisimilarity (exit 0 yes, 1 no)")
    p.add_argument("left")
    p.add_argument("right")

    p = command("minimize", cmd_minimize, "bisimulation quotient or minimal normal form")
    p.add_argument("file")
    p.add_argument("--cong")
    p.add_argument("--format", choices=["json", "dot"], default="json")

    p = command("random", cmd_random, "emit a random LTS")
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--density", type=float, default=1.5)
    p.add_argument("--tau", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)

    p = command("crosscheck", cmd_crosscheck, "compare normal forms with the oracle")
    p.add_argument("files", nargs="*")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--random", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "text"], default="json")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    if getattr(args, "depth", 1) is not None and getattr(args, "depth", 1) < 0:
        print("error: --depth must be non-negative", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (LtsError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def dispatch(argv):
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
