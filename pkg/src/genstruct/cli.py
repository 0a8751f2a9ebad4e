"""Command-line interface: ``genstruct SUBCOMMAND ...``.

Exit codes: 0 success or independent, 1 dependent or failed check,
2 unknown, 64 usage error, 65 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .amalgamation import (
    disjoint_amalgam,
    fibered_coproduct,
    independence_amalgam,
    realize_extension,
)
from .core import GenstructError, ParseError, Signature, Term, render_term
from .diagrams import DiagramError, check_complete, check_consistent, complete, psi_delta
from .flattening import flatten
from .formats import (
    Document,
    parse_document,
    render_diagram_document,
    render_extension_document,
    render_structure,
)
from .independence import alg_indep, kim_indep_proxy, m_indep_bounded, tensor_indep
from .structures import Presentation, StructureMap, diag_f, render_presentation
from .witnesses import base_monotonicity_failure, fork_not_divide_demo, tp2_array

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _Run:
    def __init__(self, out, err):
        self.out = out
        self.err = err

    def emit(self, text: str) -> None:
        self.out.write(text if text.endswith("\n") else text + "\n")

    def emit_json(self, obj) -> None:
        self.out.write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")

    def note(self, text: str) -> None:
        self.err.write(text + "\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, sig: Signature | None = None) -> Document:
    return parse_document(_read(path), sig)


def _load_presentation(path: str) -> Presentation:
    return _as_input(lambda: _load(path).presentation())


def _as_input(thunk):
    """Errors raised while building an input object are input errors."""
    try:
        return thunk()
    except ParseError:
        raise
    except DiagramError as exc:
        raise ParseError(str(exc)) from exc


def _elements(p: Presentation, text: str | None) -> list[Term]:
    if not text:
        return []
    return _as_input(lambda: p.elements(text))


def _map_option(pairs: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for pair in pairs or ():
        name, sep, term = pair.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"expected NAME=TERM, got {pair!r}")
        out[name.strip()] = term.strip()
    return out


def _structure_map(src: Presentation, dst: Presentation, overrides: dict[str, str]) -> StructureMap:
    unknown = set(overrides) - set(src.generators)
    if unknown:
        raise UsageError(f"map mentions non-generators: {', '.join(sorted(unknown))}")
    assignment = {}
    for g in src.generators:
        text = overrides.get(g, g)
        assignment[g] = _as_input(lambda: dst.element(text))
    return StructureMap(src, dst, assignment)


def _demo_signature(fn: str, arity: int) -> Signature:
    if arity < 2:
        raise UsageError("--arity must be at least 2")
    return Signature({fn: arity}, {})


# -- subcommands ----------------------------------------------------------------


def cmd_check_consistent(args, run: _Run) -> int:
    d = _as_input(lambda: _load(args.file).diagram())
    violations = check_consistent(d)
    if args.json:
        run.emit_json({"consistent": not violations, "violations": [str(v) for v in violations]})
    elif violations:
        run.emit("inconsistent")
        for v in violations:
            run.emit(f"  {v}")
    else:
        run.emit("consistent")
    return EXIT_FAIL if violations else EXIT_OK


def cmd_check_complete(args, run: _Run) -> int:
    doc = _load(args.file)
    d = _as_input(doc.diagram)
    gaps = check_complete(d, doc.sig)
    if args.json:
        run.emit_json({"complete": not gaps, "gaps": [str(g) for g in gaps]})
    elif gaps:
        run.emit("incomplete")
        for g in gaps:
            run.emit(f"  {g}")
    else:
        run.emit("complete")
    return EXIT_FAIL if gaps else EXIT_OK


def cmd_complete(args, run: _Run) -> int:
    doc = _load(args.file)
    d = _as_input(doc.diagram)
    if args.default is not None and args.default not in d.vars:
        raise UsageError(f"--default {args.default!r} is not a variable of the diagram")
    if check_consistent(d):
        raise ParseError(f"diagram is inconsistent: {check_consistent(d)[0]}")
    run.emit(render_diagram_document(complete(d, doc.sig, args.default), doc.sig))
    return EXIT_OK


def cmd_realize(args, run: _Run) -> int:
    doc = _load(args.file)
    s = doc.structure()
    run.emit(render_structure(s))
    return EXIT_OK


def cmd_diagf(args, run: _Run) -> int:
    doc = _load(args.file)
    s = _as_input(doc.structure)
    run.emit(render_diagram_document(diag_f(s), doc.sig))
    return EXIT_OK


def cmd_flatten(args, run: _Run) -> int:
    doc = _load(args.file)
    if args.formula is not None:
        doc.formula_text, doc.formula_line = args.formula, None
    for var, term in _map_option(args.x).items():
        doc.xbind[var] = term
    for var, term in _map_option(args.y).items():
        doc.ybind[var] = term
    p = _as_input(doc.presentation)
    phi = _as_input(doc.formula)
    a, b = _as_input(lambda: doc.bindings(p))
    res = flatten(phi, p, a, b)
    comments = [f"# x {v} = {render_term(e)}" for v, e in res.x.items()]
    comments += [f"# y {v} = {render_term(e)}" for v, e in res.y.items()]
    run.emit(render_extension_document(res.diagram, p.sig) + "\n".join(comments))
    return EXIT_OK


def cmd_axiom(args, run: _Run) -> int:
    doc = _load(args.file)
    d = _as_input(doc.extension)
    run.emit(psi_delta(d))
    return EXIT_OK


def cmd_amalgamate(args, run: _Run) -> int:
    A, B, C = (_load_presentation(f) for f in (args.base, args.left, args.right))
    f1 = _structure_map(A, B, _map_option(args.f1))
    f2 = _structure_map(A, C, _map_option(args.f2))
    am = fibered_coproduct(f1, f2) if args.pushout else disjoint_amalgam(f1, f2)
    run.emit(am.render())
    return EXIT_OK


def cmd_extend(args, run: _Run) -> int:
    p = _load_presentation(args.file)
    doc = _load(args.extension, p.sig)
    d = _as_input(doc.extension)
    a = _elements(p, args.tuple)
    res = realize_extension(p, a, d)
    comments = [f"x {v} = {render_term(e)}" for v, e in zip(res.x_vars, res.a)]
    comments += [f"y {v} = {render_term(e)}" for v, e in zip(res.y_vars, res.b)]
    run.emit(render_presentation(res.presentation, comments))
    return EXIT_OK


def cmd_indep(args, run: _Run) -> int:
    p = _load_presentation(args.file)
    A, B, C = (_elements(p, t) for t in (args.left, args.right, args.base))
    if args.kind == "a":
        v = alg_indep(p, A, B, C)
    elif args.kind == "kim":
        v = kim_indep_proxy(p, A, B, C)
    elif args.kind == "tensor":
        v = tensor_indep(p, A, B, C)
    else:
        v = m_indep_bounded(p, A, B, C, args.depth, args.max_bases)
    if args.json:
        run.emit_json(v.to_dict())
    else:
        run.emit(v.kind.value)
    if v.witness is not None:
        run.note(f"witness: {v.render_witness()}")
    if v.note:
        run.note(f"note: {v.note}")
    return v.exit_code


def cmd_indeptheorem(args, run: _Run) -> int:
    p = _load_presentation(args.file)
    C, a, ap, b, c = (_elements(p, t) for t in (args.base, args.a, args.ap, args.b, args.c))
    res = independence_amalgam(p, C, a, ap, b, c)
    comments = ["a'' = " + ", ".join(render_term(e) for e in res.a)]
    if args.json:
        run.emit_json({"presentation": render_presentation(res.presentation), "a_new": [render_term(e) for e in res.a]})
    else:
        run.emit(render_presentation(res.presentation, comments))
    return EXIT_OK


def cmd_demo(args, run: _Run) -> int:
    sig = _demo_signature(args.function, args.arity)
    if args.demo == "tp2":
        report = tp2_array(args.rows, args.cols, sig, args.function)
    elif args.demo == "fork-not-divide":
        report = fork_not_divide_demo(args.n, sig, args.function)
    else:
        base = [n for n in (args.base or "").replace(",", " ").split()]
        report = base_monotonicity_failure(sig, args.function, base)
    if args.json:
        run.emit_json(report.to_dict())
    else:
        run.emit(report.render())
    return EXIT_OK if report.ok else EXIT_FAIL


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genstruct", description="Flat diagrams, presentations, and independence in the generic structure.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    def add(name: str, func, help: str, json_flag: bool = False) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, description=help)
        sp.set_defaults(func=func)
        if json_flag:
            sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    sp = add("check-consistent", cmd_check_consistent, "check a flat diagram for clashing atoms", True)
    sp.add_argument("file")
    sp = add("check-complete", cmd_check_complete, "list undecided relation instances and undefined function values", True)
    sp.add_argument("file")
    sp = add("complete", cmd_complete, "complete a consistent diagram negatively")
    sp.add_argument("file")
    sp.add_argument("--default", help="value for undefined function entries (default: first variable)")
    sp = add("realize", cmd_realize, "finite structure described by a complete diagram")
    sp.add_argument("file")
    sp = add("diagf", cmd_diagf, "complete flat diagram of a finite structure")
    sp.add_argument("file")
    sp = add("flatten", cmd_flatten, "extension diagram for a satisfied formula")
    sp.add_argument("file", help="presentation, optionally with formula/xbind/ybind lines")
    sp.add_argument("--formula")
    sp.add_argument("--x", action="append", metavar="VAR=TERM")
    sp.add_argument("--y", action="append", metavar="VAR=TERM")
    sp = add("axiom", cmd_axiom, "print the axiom of an extension diagram")
    sp.add_argument("file")
    sp = add("amalgamate", cmd_amalgamate, "amalgamate two presentations over a common one")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--disjoint", action="store_true", help="disjoint amalgam (default)")
    mode.add_argument("--pushout", action="store_true", help="fibered coproduct")
    sp.add_argument("base")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--f1", action="append", metavar="GEN=TERM", help="image of a base generator in LEFT")
    sp.add_argument("--f2", action="append", metavar="GEN=TERM", help="image of a base generator in RIGHT")
    sp = add("extend", cmd_extend, "realize an extension diagram over a tuple")
    sp.add_argument("file")
    sp.add_argument("extension")
    sp.add_argument("--tuple", default="", help="comma-separated elements matched to xvars")
    sp = add("indep", cmd_indep, "decide an independence relation", True)
    sp.add_argument("--kind", choices=["a", "m", "tensor", "kim"], default="a")
    sp.add_argument("--base", default="")
    sp.add_argument("--left", default="")
    sp.add_argument("--right", default="")
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--max-bases", type=int, default=1 << 16)
    sp.add_argument("file")
    sp = add("indeptheorem", cmd_indeptheorem, "amalgamate a and a' over independent b and c", True)
    sp.add_argument("file")
    sp.add_argument("--base", default="")
    sp.add_argument("--a", required=True)
    sp.add_argument("--ap", required=True)
    sp.add_argument("--b", default="")
    sp.add_argument("--c", default="")
    sp = add("demo", cmd_demo, "run a finite witness construction", True)
    sp.add_argument("demo", choices=["tp2", "fork-not-divide", "base-mono"])
    sp.add_argument("--rows", type=int, default=2)
    sp.add_argument("--cols", type=int, default=2)
    sp.add_argument("-n", type=int, default=2)
    sp.add_argument("--function", default="f")
    sp.add_argument("--arity", type=int, default=2)
    sp.add_argument("--base", help="extra base generators for base-mono")
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    run = _Run(out, err)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "indep" and args.depth < 0:
            raise UsageError("--depth must be nonnegative")
        return args.func(args, run)
    except UsageError as exc:
        run.note(str(exc))
        return EXIT_USAGE
    except ParseError as exc:
        run.note(f"parse error: {exc}")
        return EXIT_DATA
    except GenstructError as exc:
        run.note(f"error: {exc}")
        return EXIT_FAIL
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def entry() -> None:
    sys.exit(main())
